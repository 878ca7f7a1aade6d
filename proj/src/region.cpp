#include "lglab/region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/interpolation.hpp"
#include "lglab/kernels.hpp"

namespace lglab {

const char* to_string(RegionKind kind) { return kind == RegionKind::Cap ? "cap" : "indicator"; }

double inside_fraction(double d, double gx, double gy, double a, double b) {
  const double p = std::abs(gx);
  const double q = std::abs(gy);
  const double pa = p * a;
  const double qb = q * b;
  const double s = -d;
  if (pa + qb <= 0.0) {
    return d < 0.0 ? 1.0 : 0.0;
  }
  if (qb <= 1e-4 * pa) {
    return std::clamp((s + pa) / (2.0 * pa), 0.0, 1.0);
  }
  if (pa <= 1e-4 * qb) {
    return std::clamp((s + qb) / (2.0 * qb), 0.0, 1.0);
  }
  auto ramp2 = [](double z) { return z > 0.0 ? z * z : 0.0; };
  const double g = (ramp2(s + pa + qb) - ramp2(s + pa - qb) - ramp2(s - pa + qb) +
                    ramp2(s - pa - qb)) /
                   (2.0 * p * q);
  return std::clamp(g / (4.0 * a * b), 0.0, 1.0);
}

double inside_fraction(std::span<const CellJet> jets, double a, double b, double w) {
  constexpr int kMaxVertices = 12;
  double ps[kMaxVertices] = {-a, a, a, -a};
  double pt[kMaxVertices] = {-b, -b, b, b};
  unsigned tag[kMaxVertices] = {0, 0, 0, 0};
  int np = 4;
  auto lin = [](const CellJet& f, double s, double t) { return f.d + f.fs * s + f.ft * t; };
  for (std::size_t k = 0; k < jets.size() && np > 0; ++k) {
    const CellJet& f = jets[k];
    if (std::hypot(f.fs, f.ft) * (a + b) <= 1e-14 * (1.0 + std::abs(f.d))) {
      if (f.d >= 0.0) np = 0;
      continue;
    }
    double qs[kMaxVertices];
    double qt[kMaxVertices];
    unsigned qtag[kMaxVertices];
    int nq = 0;
    for (int v = 0; v < np && nq + 2 <= kMaxVertices; ++v) {
      const int v1 = (v + 1) % np;
      const double lp = lin(f, ps[v], pt[v]);
      const double lq = lin(f, ps[v1], pt[v1]);
      if (lp <= 0.0) {
        qs[nq] = ps[v];
        qt[nq] = pt[v];
        qtag[nq++] = tag[v];
      }
      if ((lp <= 0.0) != (lq <= 0.0)) {
        const double tau = lp / (lp - lq);
        qs[nq] = ps[v] + tau * (ps[v1] - ps[v]);
        qt[nq] = pt[v] + tau * (pt[v1] - pt[v]);
        qtag[nq++] = (tag[v] & tag[v1]) | (1u << k);
      }
    }
    np = nq < 3 ? 0 : nq;
    std::copy(qs, qs + np, ps);
    std::copy(qt, qt + np, pt);
    std::copy(qtag, qtag + np, tag);
  }
  double area = 0.0;
  double moment = 0.0;
  double shift = 0.0;
  for (int v = 0; v < np; ++v) {
    const int v1 = (v + 1) % np;
    const double cr = ps[v] * pt[v1] - ps[v1] * pt[v];
    area += cr;
    moment += (ps[v] + ps[v1]) * cr;
    const unsigned on = tag[v] & tag[v1];
    for (std::size_t k = 0; k < jets.size(); ++k) {
      if (!(on & (1u << k))) continue;
      const CellJet& f = jets[k];
      auto q = [&](double s, double t) {
        return 0.5 * (f.fss * s * s + 2.0 * f.fst * s * t + f.ftt * t * t);
      };
      const double len = std::hypot(ps[v1] - ps[v], pt[v1] - pt[v]);
      const double qm = q(0.5 * (ps[v] + ps[v1]), 0.5 * (pt[v] + pt[v1]));
      shift += len * (q(ps[v], pt[v]) + 4.0 * qm + q(ps[v1], pt[v1])) /
               (6.0 * std::hypot(f.fs, f.ft));
    }
  }
  area *= 0.5;
  moment /= 6.0;
  return std::clamp((area + w * moment - shift) / (4.0 * a * b), 0.0, 1.0);
}

double inside_fraction(const CellJet& f, double a, double b, double w) {
  return inside_fraction(std::span<const CellJet>(&f, 1), a, b, w);
}

namespace {

// Cell-coordinate jet of sg * acos(x.w) (or sg * asin(x.w)) at node (i, j),
// with s = theta offset and t = phi offset.
CellJet distance_jet(const SphereGrid& grid, int i, int j, const Vec3& w, bool arc_cos, double sg) {
  const double th = grid.theta(i);
  const double st = std::sin(th);
  const double ct = std::cos(th);
  const Vec3 x = grid.node(i, j);
  const double g = std::clamp(dot(x, w), -1.0, 1.0);
  const double gs = dot(grid.e_theta(i, j), w);
  const double gp = dot(grid.e_phi(j), w);
  const double gt = st * gp;
  const double gss = -g;
  const double gst = ct * gp;
  const double gtt = -st * (st * g + ct * gs);
  const double r = 1.0 - g * g;
  CellJet jet;
  jet.d = sg * (arc_cos ? std::acos(g) : std::asin(g));
  if (r < 1e-24) {
    return jet;
  }
  const double sr = std::sqrt(r);
  const double f1 = sg * (arc_cos ? -1.0 : 1.0) / sr;
  const double f2 = sg * (arc_cos ? -1.0 : 1.0) * g / (r * sr);
  jet.fs = f1 * gs;
  jet.ft = f1 * gt;
  jet.fss = f2 * gs * gs + f1 * gss;
  jet.fst = f2 * gs * gt + f1 * gst;
  jet.ftt = f2 * gt * gt + f1 * gtt;
  return jet;
}

double jet_fraction(const SphereGrid& grid, int i, std::span<const CellJet> jets) {
  const double th = grid.theta(i);
  return inside_fraction(jets, 0.5 * grid.dtheta(), 0.5 * grid.dphi(), std::cos(th) / std::sin(th));
}

double jet_fraction(const SphereGrid& grid, int i, const CellJet& jet) {
  return jet_fraction(grid, i, std::span<const CellJet>(&jet, 1));
}

CellJet negated(CellJet f) {
  f.d = -f.d;
  f.fs = -f.fs;
  f.ft = -f.ft;
  f.fss = -f.fss;
  f.fst = -f.fst;
  f.ftt = -f.ftt;
  return f;
}

double lifted_mass_fraction(const SphereGrid& grid, std::span<const double> w) {
  Field zero(grid.size(), 0.0);
  return kernels::omp::weighted_volume(grid, zero, w) / (4.0 * M_PI);
}

// Even lift of a one-component weight field: union with the antipodal
// image when the component is the small side, intersection otherwise.
Field even_lift(const SphereGrid& grid, const Field& w) {
  const bool small_side = lifted_mass_fraction(grid, w) <= 0.5;
  Field out(grid.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double sum = w[k] + w[grid.antipode(k)];
    out[k] = small_side ? std::min(1.0, sum) : std::max(0.0, sum - 1.0);
  }
  return out;
}

Field curve_component_indicator(const SphereGrid& grid, const Curve& c) {
  const std::size_t n_nodes = grid.size();
  const int nt = grid.n_theta();
  const int nphi = grid.n_phi();
  const double spacing = std::max(grid.dtheta(), grid.dphi());
  const double band = 1.5 * spacing;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n_nodes, kInf);
  std::vector<signed char> sign(n_nodes, 0);  // -1 inside, +1 outside
  // Nearest feature: one edge's great circle, or a vertex's two edges
  // combined by intersection (convex) or union (reflex).
  enum : signed char { kEdge, kConvex, kReflex };
  std::vector<std::array<Vec3, 2>> feature(n_nodes);
  std::vector<signed char> mode(n_nodes, kEdge);
  std::vector<double> vertex_best(n_nodes, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> vertex_index(n_nodes, 0);

  const std::vector<Vec3> normals = inner_normals(c);
  const std::size_t ne = c.size();
  std::vector<Vec3> gc(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    gc[e] = normalized(cross(c[e], c.next(e)));
  }
  for (std::size_t e = 0; e < c.size(); ++e) {
    const Vec3& a = c[e];
    const Vec3& b = c.next(e);
    const std::size_t eb = (e + 1) % c.size();
    const Vec3 n = normalized(cross(a, b));
    const Vec3 mid = normalized(a + b);
    const double reach = 0.5 * arc_distance(a, b) + band;
    double tm = 0.0;
    double pm = 0.0;
    to_spherical(mid, tm, pm);
    const int i_lo = std::max(0, static_cast<int>(std::floor((tm - reach) / grid.dtheta() - 0.5)));
    const int i_hi =
        std::min(nt - 1, static_cast<int>(std::ceil((tm + reach) / grid.dtheta() - 0.5)));
    for (int i = i_lo; i <= i_hi; ++i) {
      const double ti = grid.theta(i);
      const double denom = std::sin(ti) * std::sin(tm);
      const double num = std::cos(reach) - std::cos(ti) * std::cos(tm);
      int j_lo = 0;
      int j_hi = nphi - 1;
      if (denom > 0.0) {
        const double ratio = num / denom;
        if (ratio > 1.0) {
          continue;
        }
        if (ratio > -1.0) {
          const double half = std::acos(ratio);
          j_lo = static_cast<int>(std::floor((pm - half) / grid.dphi())) - 1;
          j_hi = static_cast<int>(std::ceil((pm + half) / grid.dphi())) + 1;
          if (j_hi - j_lo >= nphi) {
            j_lo = 0;
            j_hi = nphi - 1;
          }
        }
      }
      for (int jj = j_lo; jj <= j_hi; ++jj) {
        const int j = ((jj % nphi) + nphi) % nphi;
        const std::size_t k = grid.index(i, j);
        const Vec3 p = grid.node(i, j);
        const double s = dot(p, n);
        const Vec3 q = p - n * s;
        const double dv = arc_distance(p, a);
        if (dv < vertex_best[k]) {
          vertex_best[k] = dv;
          vertex_index[k] = e;
        }
        double dist = 0.0;
        signed char sg = 0;
        std::array<Vec3, 2> feat{n, n};
        signed char md = kEdge;
        const bool interior = norm(q) > 1e-12 && dot(cross(a, q), n) >= 0.0 &&
                              dot(cross(q, b), n) >= 0.0;
        if (interior) {
          dist = std::atan2(std::abs(s), norm(q));
          sg = s > 0.0 ? -1 : 1;
        } else {
          const double da = arc_distance(p, a);
          const double db = arc_distance(p, b);
          const Vec3& nu = da <= db ? normals[e] : normals[eb];
          dist = std::min(da, db);
          sg = dot(p, nu) > 0.0 ? -1 : 1;
          // Near a vertex the boundary is locally the union or intersection
          // of the two adjacent half-planes.
          const std::size_t e_in = da <= db ? (e + ne - 1) % ne : e;
          const std::size_t e_out = (e_in + 1) % ne;
          feat = {gc[e_in], gc[e_out]};
          md = dot(c.next(e_out), gc[e_in]) > 0.0 ? kConvex : kReflex;
        }
        if (dist < best[k]) {
          best[k] = dist;
          sign[k] = sg;
          feature[k] = feat;
          mode[k] = md;
        }
      }
    }
  }

  Field w(n_nodes, 0.0);
  std::vector<signed char> label(n_nodes, 0);
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    if (best[k] <= band) {
      const int i = grid.row(k);
      const int j = grid.col(k);
      if (vertex_best[k] < spacing) {
        const std::size_t e_out = vertex_index[k];
        const std::size_t e_in = (e_out + ne - 1) % ne;
        feature[k] = {gc[e_in], gc[e_out]};
        mode[k] = dot(c.next(e_out), gc[e_in]) > 0.0 ? kConvex : kReflex;
      }
      const CellJet f0 = distance_jet(grid, i, j, feature[k][0], false, -1.0);
      if (mode[k] == kEdge) {
        w[k] = jet_fraction(grid, i, f0);
      } else {
        const CellJet f1 = distance_jet(grid, i, j, feature[k][1], false, -1.0);
        if (mode[k] == kConvex) {
          const CellJet both[2] = {f0, f1};
          w[k] = jet_fraction(grid, i, both);
        } else {
          const CellJet both[2] = {negated(f0), negated(f1)};
          w[k] = 1.0 - jet_fraction(grid, i, both);
        }
      }
      label[k] = sign[k];
      queue.push_back(k);
    }
  }
  if (queue.empty()) {
    throw Error(ErrorKind::Resolution, "curve is too small to be resolved by the grid");
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const int i = grid.row(k);
    const int j = grid.col(k);
    std::size_t nb[4];
    nb[0] = grid.index(i, (j + 1) % nphi);
    nb[1] = grid.index(i, (j + nphi - 1) % nphi);
    nb[2] = i + 1 < nt ? grid.index(i + 1, j) : grid.index(i, (j + nphi / 2) % nphi);
    nb[3] = i > 0 ? grid.index(i - 1, j) : grid.index(i, (j + nphi / 2) % nphi);
    for (std::size_t m : nb) {
      if (label[m] == 0) {
        label[m] = label[k];
        w[m] = label[k] < 0 ? 1.0 : 0.0;
        queue.push_back(m);
      }
    }
  }
  return w;
}

}  // namespace

Field cap_indicator(const SphereGrid& grid, Base base, const Cap& cap) {
  const Vec3 c = normalized(cap.center);
  Field w(grid.size());
  const bool even = base == Base::ProjectivePlane;
  const int rows = even ? grid.n_theta() / 2 : grid.n_theta();
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      CellJet jet = distance_jet(grid, i, j, c, true, 1.0);
      jet.d -= cap.aperture;
      const std::size_t k = grid.index(i, j);
      w[k] = jet_fraction(grid, i, jet);
      if (even) {
        // The ball is the union of the two disjoint caps around c and -c.
        CellJet back = distance_jet(grid, i, j, -c, true, 1.0);
        back.d -= cap.aperture;
        w[k] = std::min(1.0, w[k] + jet_fraction(grid, i, back));
        w[grid.antipode(k)] = w[k];
      }
    }
  }
  return w;
}

Field curve_indicator(const SphereGrid& grid, Base base, const Curve& boundary) {
  validate_curve(boundary);
  Field w = curve_component_indicator(grid, boundary);
  return base == Base::ProjectivePlane ? even_lift(grid, w) : w;
}

double volume_fraction(const ConformalMetric& m, std::span<const double> indicator) {
  const double full = kernels::omp::weighted_volume(m.grid(), m.u(), {});
  return kernels::omp::weighted_volume(m.grid(), m.u(), indicator) / full;
}

Region make_cap_region(const ConformalMetric& m, const Cap& cap, bool complement, int n_vertices) {
  const double max_aperture = m.base() == Base::ProjectivePlane ? 0.5 * M_PI : M_PI;
  if (!(cap.aperture > 0.0 && cap.aperture <= max_aperture)) {
    throw Error(ErrorKind::Domain, "cap aperture out of range");
  }
  Region r;
  r.kind = RegionKind::Cap;
  r.cap = {normalized(cap.center), cap.aperture};
  r.complement = complement;
  Curve circle = geodesic_circle(r.cap.center, cap.aperture, n_vertices);
  r.boundary = complement ? reversed(circle) : std::move(circle);
  r.indicator = cap_indicator(m.grid(), m.base(), r.cap);
  if (complement) {
    for (double& v : r.indicator) {
      v = 1.0 - v;
    }
  }
  r.volume_fraction = volume_fraction(m, r.indicator);
  return r;
}

Region make_curve_region(const ConformalMetric& m, Curve boundary) {
  Region r;
  r.kind = RegionKind::GridIndicator;
  r.indicator = curve_indicator(m.grid(), m.base(), boundary);
  r.boundary = std::move(boundary);
  r.volume_fraction = volume_fraction(m, r.indicator);
  return r;
}

RegionMeasures region_measures(const ConformalMetric& m, const Region& r) {
  if (r.indicator.size() != m.grid().size()) {
    throw Error(ErrorKind::Domain, "region does not live on this metric's grid");
  }
  RegionMeasures out;
  out.volume = integrate_volume(m, r.indicator);
  out.volume_fraction = out.volume / m.total_volume();
  if (!(out.volume_fraction > 0.0 && out.volume_fraction < 1.0)) {
    throw Error(ErrorKind::Domain, "region is empty or covers the whole surface");
  }
  out.boundary_area = boundary_length(m, r);
  return out;
}

double cap_boundary_length(const ConformalMetric& m, const Cap& cap, int samples) {
  const Vec3 c = normalized(cap.center);
  const Vec3 e1 = any_orthogonal(c);
  const Vec3 e2 = cross(c, e1);
  const double ca = std::cos(cap.aperture);
  const double sa = std::sin(cap.aperture);
  double total = 0.0;
  for (int b = 0; b < samples; ++b) {
    const double s = 2.0 * M_PI * (b + 0.5) / samples;
    const Vec3 x = normalized(c * ca + (e1 * std::cos(s) + e2 * std::sin(s)) * sa);
    total += std::exp(sample_at(m.grid(), m.u(), x));
  }
  return total * 2.0 * M_PI * sa / samples;
}

double boundary_length(const ConformalMetric& m, const Region& r) {
  if (r.kind == RegionKind::Cap) return cap_boundary_length(m, r.cap);
  return curve_length(m, r.boundary);
}

Vec3 barycenter(const ConformalMetric& m, const Region& r) {
  const SphereGrid& grid = m.grid();
  Field w = r.indicator;
  if (m.base() == Base::ProjectivePlane) {
    w = r.kind == RegionKind::Cap && !r.complement ? cap_indicator(grid, Base::Sphere, r.cap)
                                                   : curve_component_indicator(grid, r.boundary);
  }
  Vec3 sum;
  for (int i = 0; i < grid.n_theta(); ++i) {
    Vec3 row;
    for (int j = 0; j < grid.n_phi(); ++j) {
      const std::size_t k = grid.index(i, j);
      row += grid.node(i, j) * (w[k] * std::exp(2.0 * m.u()[k]));
    }
    sum += row * grid.cell_area(i);
  }
  return normalized(sum);
}

}  // namespace lglab
