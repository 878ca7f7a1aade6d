#include "lglab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/kernels.hpp"

namespace lglab {

namespace {

// Distances and cut-cell parameters of every node relative to a center at
// longitude zero. Rotating the center about the polar axis by whole grid
// columns rotates all of these along with it, so one table serves a whole
// row of centers.
struct CenterRowTable {
  std::vector<double> dist;
  std::vector<double> gx;
  std::vector<double> gy;
  std::vector<int> order;      // node indices sorted by distance bin
  std::vector<int> bin_start;  // size n_bins + 1
  double bin_width = 0.0;
  int n_bins = 0;
};

CenterRowTable build_row_table(const SphereGrid& grid, Base base, int center_row) {
  const int nt = grid.n_theta();
  const int nphi = grid.n_phi();
  const std::size_t n = grid.size();
  const Vec3 c = grid.node(center_row, 0);
  CenterRowTable t;
  t.dist.resize(n);
  t.gx.resize(n);
  t.gy.resize(n);
  t.bin_width = 0.5 * std::max(grid.dtheta(), grid.dphi());
  t.n_bins = static_cast<int>(std::ceil(M_PI / t.bin_width)) + 2;
  std::vector<int> bin(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nphi; ++j) {
      const std::size_t k = grid.index(i, j);
      const Vec3 p = grid.node(i, j);
      const double ct = dot(c, grid.e_theta(i, j));
      const double cp = dot(c, grid.e_phi(j));
      const double sine = std::hypot(ct, cp);
      double d = std::atan2(sine, dot(c, p));
      double sgn = -1.0;  // outward = away from the center
      if (base == Base::ProjectivePlane && d > 0.5 * M_PI) {
        d = M_PI - d;
        sgn = 1.0;
      }
      t.dist[k] = d;
      if (sine > 1e-14) {
        t.gx[k] = sgn * ct / sine;
        t.gy[k] = sgn * cp / sine;
      } else {
        t.gx[k] = 1.0;
        t.gy[k] = 0.0;
      }
      bin[k] = std::min(t.n_bins - 1, static_cast<int>(d / t.bin_width));
    }
  }
  t.bin_start.assign(t.n_bins + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    ++t.bin_start[bin[k] + 1];
  }
  for (int b = 0; b < t.n_bins; ++b) {
    t.bin_start[b + 1] += t.bin_start[b];
  }
  t.order.resize(n);
  std::vector<int> fill(t.bin_start.begin(), t.bin_start.end() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    t.order[fill[bin[k]]++] = static_cast<int>(k);
  }
  return t;
}

// Volume of the cap about (center_row, center_col) as a function of aperture.
class CapVolume {
 public:
  CapVolume(const SphereGrid& grid, const CenterRowTable& table, const std::vector<double>& mass,
            int center_col)
      : grid_(grid), table_(table), mass_(mass), shift_(center_col) {
    const int nb = table.n_bins;
    prefix_.assign(nb + 1, 0.0);
    for (int b = 0; b < nb; ++b) {
      double s = 0.0;
      for (int q = table.bin_start[b]; q < table.bin_start[b + 1]; ++q) {
        s += mass_[shifted(table.order[q])];
      }
      prefix_[b + 1] = prefix_[b] + s;
    }
    half_theta_ = 0.5 * grid.dtheta();
    reach_ = std::hypot(0.5 * grid.dtheta(), 0.5 * grid.dphi());
  }

  double total() const { return prefix_.back(); }

  double operator()(double aperture) const {
    const int nb = table_.n_bins;
    const int lo = std::clamp(static_cast<int>(std::floor((aperture - reach_) / table_.bin_width)),
                              0, nb);
    const int hi = std::clamp(static_cast<int>(std::floor((aperture + reach_) / table_.bin_width)),
                              -1, nb - 1);
    double v = prefix_[lo];
    for (int b = lo; b <= hi; ++b) {
      for (int q = table_.bin_start[b]; q < table_.bin_start[b + 1]; ++q) {
        const int k = table_.order[q];
        const int i = grid_.row(k);
        const double half_phi = 0.5 * std::sin(grid_.theta(i)) * grid_.dphi();
        v += mass_[shifted(k)] *
             inside_fraction(table_.dist[k] - aperture, table_.gx[k], table_.gy[k], half_theta_,
                             half_phi);
      }
    }
    return v;
  }

 private:
  std::size_t shifted(int k) const {
    const int nphi = grid_.n_phi();
    const int i = k / nphi;
    const int j = (k % nphi + shift_) % nphi;
    return static_cast<std::size_t>(i) * nphi + j;
  }

  const SphereGrid& grid_;
  const CenterRowTable& table_;
  const std::vector<double>& mass_;
  int shift_;
  std::vector<double> prefix_;
  double half_theta_ = 0.0;
  double reach_ = 0.0;
};

// Illinois-modified regula falsi on a monotone increasing function.
std::optional<double> solve_aperture(const CapVolume& vol, double target_fraction, double guess,
                                     double max_aperture, double tol) {
  const double total = vol.total();
  auto g = [&](double a) { return vol(a) / total - target_fraction; };
  double lo = 0.0;
  double hi = max_aperture;
  double g_lo = g(lo);
  double g_hi = g(hi);
  if (g_lo > 0.0 || g_hi < 0.0) {
    return std::nullopt;
  }
  double x = std::clamp(guess, lo, hi);
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double gx = g(x);
    if (std::abs(gx) <= tol) {
      return x;
    }
    if (gx < 0.0) {
      lo = x;
      g_lo = gx;
      if (side == -1) {
        g_hi *= 0.5;
      }
      side = -1;
    } else {
      hi = x;
      g_hi = gx;
      if (side == 1) {
        g_lo *= 0.5;
      }
      side = 1;
    }
    if (hi - lo < 1e-15) {
      return 0.5 * (lo + hi);
    }
    x = lo - g_lo * (hi - lo) / (g_hi - g_lo);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
    }
  }
  return std::abs(g(x)) <= 100.0 * tol ? std::optional<double>(x) : std::nullopt;
}

double round_aperture_guess(Base base, double fraction) {
  const double c = base == Base::ProjectivePlane ? 1.0 - fraction : 1.0 - 2.0 * fraction;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Re-solves the aperture of the selected cap against the second-order
// cut-cell indicator (the sweep tables use the linear one).
double polish_aperture(const ConformalMetric& m, const Cap& cap, double target, double tol) {
  const double max_aperture = m.base() == Base::ProjectivePlane ? 0.5 * M_PI : M_PI;
  auto residual = [&](double a) {
    return volume_fraction(m, cap_indicator(m.grid(), m.base(), Cap{cap.center, a})) - target;
  };
  double a0 = cap.aperture;
  double r0 = residual(a0);
  double a1 = std::min(max_aperture, a0 + 1e-4);
  double r1 = residual(a1);
  for (int it = 0; it < 12 && std::abs(r1) > 1e-2 * tol; ++it) {
    if (r1 == r0) break;
    const double a2 = std::clamp(a1 - r1 * (a1 - a0) / (r1 - r0), 1e-9, max_aperture);
    a0 = a1;
    r0 = r1;
    a1 = a2;
    r1 = residual(a1);
  }
  return std::abs(r1) <= std::abs(r0) ? a1 : a0;
}

}  // namespace

ProfileCurve cap_sweep(const ConformalMetric& m, std::span<const double> volumes,
                       const SweepOptions& options) {
  const SphereGrid& grid = m.grid();
  const Base base = m.base();
  for (double v : volumes) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorKind::Domain, "volume fractions must lie in (0, 1)");
    }
  }

  // Cap fractions needed: v for direct candidates, 1 - v for complements.
  std::vector<double> targets;
  for (double v : volumes) {
    targets.push_back(v);
    targets.push_back(1.0 - v);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                targets.end());
  auto target_index = [&](double f) {
    std::size_t best = 0;
    for (std::size_t q = 1; q < targets.size(); ++q) {
      if (std::abs(targets[q] - f) < std::abs(targets[best] - f)) {
        best = q;
      }
    }
    return best;
  };

  std::vector<double> mass(grid.size());
  for (int i = 0; i < grid.n_theta(); ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      const std::size_t k = grid.index(i, j);
      mass[k] = std::exp(2.0 * m.u()[k]) * grid.cell_area(i);
    }
  }

  const int stride = std::max(1, options.center_stride);
  std::vector<int> center_rows;
  for (int i = 0; i < grid.n_theta(); i += stride) {
    if (base == Base::ProjectivePlane && grid.theta(i) >= 0.5 * M_PI) {
      break;
    }
    center_rows.push_back(i);
  }
  std::vector<int> center_cols;
  for (int j = 0; j < grid.n_phi(); j += stride) {
    center_cols.push_back(j);
  }
  const double max_aperture = base == Base::ProjectivePlane ? 0.5 * M_PI : M_PI;
  const std::size_t n_centers = center_rows.size() * center_cols.size();
  const std::size_t nt = targets.size();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> aperture(n_centers * nt, kNaN);
  std::vector<double> length(n_centers * nt, kNaN);

  for (std::size_t r = 0; r < center_rows.size(); ++r) {
    const CenterRowTable table = build_row_table(grid, base, center_rows[r]);
    const int ncols = static_cast<int>(center_cols.size());
#pragma omp parallel for schedule(dynamic)
    for (int cc = 0; cc < ncols; ++cc) {
      const std::size_t center = r * center_cols.size() + cc;
      const CapVolume vol(grid, table, mass, center_cols[cc]);
      const Vec3 c = grid.node(center_rows[r], center_cols[cc]);
      for (std::size_t q = 0; q < nt; ++q) {
        const auto a = solve_aperture(vol, targets[q], round_aperture_guess(base, targets[q]),
                                      max_aperture, 1e-2 * options.fraction_tolerance);
        if (!a || *a <= 0.0) {
          continue;
        }
        aperture[center * nt + q] = *a;
        length[center * nt + q] =
            cap_boundary_length(m, Cap{c, *a});
      }
    }
  }

  ProfileCurve out;
  out.base = base;
  out.total_volume = m.total_volume();
  std::vector<double> sorted(volumes.begin(), volumes.end());
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    ProfileSample s;
    s.v = v;
    const std::size_t qd = target_index(v);
    const std::size_t qc = target_index(1.0 - v);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_center = 0;
    bool best_complement = false;
    for (std::size_t center = 0; center < n_centers; ++center) {
      const double ld = length[center * nt + qd];
      if (ld < best) {
        best = ld;
        best_center = center;
        best_complement = false;
      }
      const double lc = length[center * nt + qc];
      if (lc < best) {
        best = lc;
        best_center = center;
        best_complement = true;
      }
    }
    if (!std::isfinite(best)) {
      s.error = "no cap of fraction " + std::to_string(v) + " could be bracketed";
      out.samples.push_back(std::move(s));
      continue;
    }
    const std::size_t q = best_complement ? qc : qd;
    const Cap cap{grid.node(center_rows[best_center / center_cols.size()],
                            center_cols[best_center % center_cols.size()]),
                  aperture[best_center * nt + q]};
    const double a = polish_aperture(m, cap, best_complement ? 1.0 - v : v,
                                     options.fraction_tolerance);
    Region witness =
        make_cap_region(m, Cap{cap.center, a}, best_complement, options.boundary_vertices);
    s.area = boundary_length(m, witness);
    s.normalized = s.area / out.total_volume;
    s.witness = std::move(witness);
    out.samples.push_back(std::move(s));
  }
  return out;
}

namespace {

Curve offset_curve(const Curve& c, const CurveFrame& frame, double delta) {
  Curve out = c;
  for (std::size_t b = 0; b < c.size(); ++b) {
    out.vertices[b] = sphere_exp(c[b], frame.normals[b] * (delta * std::exp(-frame.u[b])));
  }
  return out;
}

// Moves the curve along its conformal normal until the enclosed fraction
// equals v; the fraction decreases as delta grows.
std::optional<Curve> pin_fraction(const ConformalMetric& m, const Curve& c, double v,
                                  double tolerance) {
  const CurveFrame frame = curve_frame(m, c);
  auto fraction = [&](double delta) {
    return volume_fraction(m, curve_indicator(m.grid(), m.base(), offset_curve(c, frame, delta)));
  };
  double f0 = fraction(0.0);
  if (std::abs(f0 - v) <= tolerance) {
    return c;
  }
  double length = 0.0;
  for (double ds : frame.ds) {
    length += ds;
  }
  double step = 2.0 * std::abs(f0 - v) * m.total_volume() / length + 1e-9;
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = f0;
  double f_hi = f0;
  // Bracket: fraction(lo) > v > fraction(hi), lo < hi.
  if (f0 > v) {
    lo = 0.0;
    hi = step;
    f_hi = fraction(hi);
    for (int it = 0; f_hi > v && it < 40; ++it) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = fraction(hi);
    }
  } else {
    hi = 0.0;
    lo = -step;
    f_lo = fraction(lo);
    for (int it = 0; f_lo < v && it < 40; ++it) {
      hi = lo;
      f_hi = f_lo;
      lo *= 2.0;
      f_lo = fraction(lo);
    }
  }
  if (!(f_lo >= v && f_hi <= v)) {
    return std::nullopt;
  }
  for (int it = 0; it < 80; ++it) {
    double mid = lo + (f_lo - v) * (hi - lo) / (f_lo - f_hi);
    if (!(mid > lo && mid < hi) || it % 3 == 2) {
      mid = 0.5 * (lo + hi);
    }
    const double fm = fraction(mid);
    if (std::abs(fm - v) <= tolerance) {
      return offset_curve(c, frame, mid);
    }
    if (fm > v) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  return std::nullopt;
}

}  // namespace

RefineResult curve_flow_refine(const ConformalMetric& m, const Region& r, double v,
                               const RefineOptions& options) {
  if (std::abs(v - r.volume_fraction) > 1e-2) {
    throw Error(ErrorKind::Domain, "target fraction is more than 1e-2 away from the region's");
  }
  RefineResult result;
  result.region = r;
  result.initial_area = boundary_length(m, r);
  result.final_area = result.initial_area;

  Curve c = r.boundary;
  const int n = static_cast<int>(c.size());
  const double total = m.total_volume();
  double fraction = r.volume_fraction;

  for (int step = 0;; ++step) {
    const CurveFrame frame = curve_frame(m, c);
    double length = 0.0;
    double weighted = 0.0;
    for (int b = 0; b < n; ++b) {
      length += frame.ds[b];
      weighted += frame.k[b] * frame.ds[b];
    }
    const double mean_k = weighted / length;
    double deviation = 0.0;
    for (int b = 0; b < n; ++b) {
      deviation = std::max(deviation, std::abs(frame.k[b] - mean_k));
    }
    result.max_deviation = deviation;
    result.steps = step;
    if (deviation < options.curvature_tolerance) {
      result.converged = true;
      break;
    }
    if (step >= options.max_steps) {
      result.warning = "flow did not converge";
      break;
    }
    if (step > 0 && step % options.remeasure_every == 0) {
      if (self_intersects(c)) {
        result.self_intersection = true;
        result.warning = "self-intersection detected; flow aborted";
        result.region = r;
        return result;
      }
      fraction = volume_fraction(m, curve_indicator(m.grid(), m.base(), c));
    }
    const double control = -options.controller_gain * (v - fraction) * total / length;

    double min_edge = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n; ++b) {
      const double e = arc_distance(c[b], c.next(b)) * std::exp(0.5 * (frame.u[b] + frame.u[(b + 1) % n]));
      min_edge = std::min(min_edge, e);
    }
    const double dt = options.step_factor * min_edge * min_edge;
    for (int b = 0; b < n; ++b) {
      const double speed = frame.k[b] - mean_k + control;
      c.vertices[b] = sphere_exp(c[b], frame.normals[b] * (dt * std::exp(-frame.u[b]) * speed));
    }
    if ((step + 1) % options.resample_every == 0) {
      c = resample_uniform(c, n);
    }
  }

  if (result.steps == 0) {
    // Already stationary: nothing moved.
    result.improved = false;
    return result;
  }
  if (self_intersects(c)) {
    result.self_intersection = true;
    result.warning = "self-intersection detected; flow aborted";
    return result;
  }
  const auto pinned = pin_fraction(m, c, v, options.fraction_tolerance);
  if (!pinned) {
    result.warning = "could not restore the volume fraction";
    return result;
  }
  Region refined = make_curve_region(m, *pinned);
  const double area = curve_length(m, refined.boundary);
  if (area > result.initial_area + 1e-9) {
    result.warning += result.warning.empty() ? "" : "; ";
    result.warning += "flow did not shorten the boundary";
    return result;
  }
  result.region = std::move(refined);
  result.final_area = area;
  result.improved = true;
  return result;
}

std::vector<LgValue> lg_functional(const ConformalMetric& m, std::span<const double> volumes,
                                  bool refine, const SweepOptions& sweep,
                                  const RefineOptions& flow) {
  ProfileCurve profile = cap_sweep(m, volumes, sweep);
  std::vector<LgValue> out;
  out.reserve(profile.samples.size());
  for (ProfileSample& s : profile.samples) {
    if (!s.witness) {
      throw Error(ErrorKind::Domain, s.error);
    }
    LgValue lg;
    lg.sweep_value = s.normalized;
    lg.value = s.normalized;
    lg.witness = std::move(*s.witness);
    if (refine) {
      RefineResult rr = curve_flow_refine(m, lg.witness, s.v, flow);
      lg.converged = rr.converged;
      if (rr.improved) {
        lg.refined = true;
        lg.value = rr.final_area / m.total_volume();
        lg.witness = std::move(rr.region);
      }
    }
    out.push_back(std::move(lg));
  }
  return out;
}

LgValue lg_functional(const ConformalMetric& m, double v, bool refine, const SweepOptions& sweep,
                      const RefineOptions& flow) {
  const double volumes[1] = {v};
  return std::move(lg_functional(m, volumes, refine, sweep, flow).front());
}

double model_profile(double v, double K) { return std::sqrt(v * (1.0 - v)) * std::sqrt(K); }

LevyGromovReport check_levy_gromov(const ConformalMetric& m, std::span<const double> volumes,
                                   bool refine) {
  const CurvatureField curvature = gauss_curvature(m);
  if (curvature.min_value < m.K() - kHypothesisSlack) {
    throw Error(ErrorKind::Precondition,
                "Gauss curvature " + std::to_string(curvature.min_value) +
                    " is below the bound K = " + std::to_string(m.K()));
  }
  LevyGromovReport report;
  report.curvature_min = curvature.min_value;
  report.K = m.K();
  report.min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> sorted(volumes.begin(), volumes.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<LgValue> values = lg_functional(m, sorted, refine);
  for (std::size_t q = 0; q < sorted.size(); ++q) {
    const double v = sorted[q];
    LevyGromovEntry e;
    e.v = v;
    e.value = values[q].value;
    e.model = model_profile(v, m.K());
    e.margin = e.value - e.model;
    report.min_margin = std::min(report.min_margin, e.margin);
    report.entries.push_back(e);
  }
  report.pass = report.min_margin >= -kMarginTolerance;
  return report;
}

}  // namespace lglab
