#include "lglab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/kernels.hpp"

namespace lglab {

double mollifier(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

NormalField make_normal_field(const ConformalMetric& m, const Curve& boundary, std::size_t vertex,
                              double radius) {
  if (vertex >= boundary.size() || !(radius > 0.0)) {
    throw Error(ErrorKind::Domain, "normal field needs a boundary vertex and a positive radius");
  }
  const CurveFrame frame = curve_frame(m, boundary);
  NormalField nf;
  nf.vertex = vertex;
  nf.support_center = boundary[vertex];
  nf.support_radius = radius;
  nf.phi.resize(boundary.size());
  double total = 0.0;
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    nf.phi[b] = mollifier(arc_distance(boundary[b], nf.support_center) / radius);
    total += nf.phi[b] * frame.ds[b];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::Support, "normal field radius covers no boundary length");
  }
  for (double& p : nf.phi) {
    p /= total;
  }
  return nf;
}

Curve displace(const ConformalMetric& m, const Curve& boundary, const NormalField& nf, double s) {
  if (nf.phi.size() != boundary.size()) {
    throw Error(ErrorKind::Domain, "normal field does not match the boundary");
  }
  if (s == 0.0) {
    return boundary;
  }
  const CurveFrame frame = curve_frame(m, boundary);
  Curve out = boundary;
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    if (nf.phi[b] != 0.0) {
      out.vertices[b] =
          sphere_exp(boundary[b], frame.normals[b] * (s * nf.phi[b] * std::exp(-frame.u[b])));
    }
  }
  return out;
}

Region polygon_region(const ConformalMetric& m, const Region& r) {
  if (r.kind == RegionKind::Cap) {
    return make_curve_region(m, r.boundary);
  }
  return r;
}

namespace {

double fd_tolerance(double value) { return std::max(1e-4, 1e-2 * std::abs(value)); }

void expect_close(const char* what, double analytic, double fd, double tol) {
  if (!(std::abs(analytic - fd) <= tol)) {
    throw Error(ErrorKind::FormulaValidation,
                std::string(what) + ": analytic " + std::to_string(analytic) +
                    " vs finite difference " + std::to_string(fd));
  }
}

Field product(std::span<const double> a, std::span<const double> b) {
  Field out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = a[k] * b[k];
  }
  return out;
}

double fraction_of(const ConformalMetric& m, const Curve& c) {
  return volume_fraction(m, curve_indicator(m.grid(), m.base(), c));
}

}  // namespace

ConformalVariation first_variation_conformal(const ConformalMetric& m, const Region& r,
                                             std::span<const double> u) {
  if (u.size() != m.grid().size()) {
    throw Error(ErrorKind::Domain, "perturbation does not match the grid");
  }
  ConformalVariation out;
  const Field wu = product(r.indicator, u);
  out.dV_dt = 2.0 * integrate_volume(m, std::span<const double>(wu));
  out.dA_dt = curve_integral(m, r.boundary, u);
  out.dVM_dt = 2.0 * integrate_volume(m, u);

  const double h = kConformalFdStep;
  const ConformalMetric plus = m.perturbed(u, h);
  const ConformalMetric minus = m.perturbed(u, -h);
  const std::span<const double> w(r.indicator);
  out.dV_dt_fd = (integrate_volume(plus, w) - integrate_volume(minus, w)) / (2.0 * h);
  out.dA_dt_fd = (curve_length(plus, r.boundary) - curve_length(minus, r.boundary)) / (2.0 * h);
  out.dVM_dt_fd = (plus.total_volume() - minus.total_volume()) / (2.0 * h);
  expect_close("dV/dt", out.dV_dt, out.dV_dt_fd, fd_tolerance(out.dV_dt));
  expect_close("dA/dt", out.dA_dt, out.dA_dt_fd, fd_tolerance(out.dA_dt));
  expect_close("dV(M)/dt", out.dVM_dt, out.dVM_dt_fd, fd_tolerance(out.dVM_dt));
  return out;
}

FlowVariation first_variation_flow(const ConformalMetric& m, const Region& r,
                                   const NormalField& nf) {
  const Region poly = polygon_region(m, r);
  const Curve& c = poly.boundary;
  const CurveFrame frame = curve_frame(m, c);
  double length = 0.0;
  double weighted = 0.0;
  double phi_integral = 0.0;
  for (std::size_t b = 0; b < c.size(); ++b) {
    length += frame.ds[b];
    weighted += frame.k[b] * frame.ds[b];
    phi_integral += nf.phi[b] * frame.ds[b];
  }
  FlowVariation out;
  out.lambda = weighted / length;
  double deviation = 0.0;
  for (double k : frame.k) {
    deviation = std::max(deviation, std::abs(k - out.lambda));
  }
  if (deviation > 1e-2) {
    throw Error(ErrorKind::Precondition, "boundary curvature is not constant (deviation " +
                                             std::to_string(deviation) + ")");
  }
  out.dV_ds = -phi_integral;
  out.dA_ds = -out.lambda * phi_integral;

  // Central differences at h and h/2 combined by Richardson extrapolation;
  // the plain difference loses accuracy like (h / radius)^2 for narrow fields.
  const double h = kFlowFdStep;
  const double total = m.total_volume();
  auto central = [&](double step, double& dv, double& da) {
    const Curve plus = displace(m, c, nf, step);
    const Curve minus = displace(m, c, nf, -step);
    dv = (fraction_of(m, plus) - fraction_of(m, minus)) * total / (2.0 * step);
    da = (curve_length(m, plus) - curve_length(m, minus)) / (2.0 * step);
  };
  double dv1 = 0.0, da1 = 0.0, dv2 = 0.0, da2 = 0.0;
  central(h, dv1, da1);
  central(0.5 * h, dv2, da2);
  out.dV_ds_fd = (4.0 * dv2 - dv1) / 3.0;
  out.dA_ds_fd = (4.0 * da2 - da1) / 3.0;
  expect_close("dV/ds", out.dV_ds, out.dV_ds_fd, 1e-3);
  expect_close("dA/ds", out.dA_ds, out.dA_ds_fd, 1e-3);
  return out;
}

namespace {

Field bump_field(const SphereGrid& grid, Base base, const Vec3& center, double radius) {
  Field d(grid.size());
  kernels::omp::distances_to(grid, center, d);
  Field out(grid.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    out[k] = mollifier(d[k] / radius);
  }
  if (base == Base::ProjectivePlane) {
    Field even(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      even[k] = out[k] + out[grid.antipode(k)];
    }
    return even;
  }
  return out;
}

double distance_to_curve(const Vec3& p, const Curve& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < c.size(); ++b) {
    best = std::min(best, arc_distance(p, c[b]));
  }
  return best;
}

// Every node carrying the bump must sit in cells entirely on the required
// side (indicator exactly `side`) and farther from the boundary than the
// interpolation stencil reaches, so the bump contributes nothing to
// boundary integrals.
void check_support(const SphereGrid& grid, const Field& bump, const Field& indicator, double side,
                   const Curve& c, double margin, const char* name) {
  bool any = false;
  for (std::size_t k = 0; k < bump.size(); ++k) {
    if (bump[k] == 0.0) {
      continue;
    }
    any = true;
    if (indicator[k] != side || distance_to_curve(grid.node(k), c) <= margin) {
      throw Error(ErrorKind::Support, std::string(name) + " support leaves its side of the boundary");
    }
  }
  if (!any) {
    throw Error(ErrorKind::Support, std::string(name) + " support contains no grid node");
  }
}

}  // namespace

DescentPerturbation build_descent_perturbation(const ConformalMetric& m, const Region& r,
                                               std::size_t vertex, double radius) {
  const Region poly = polygon_region(m, r);
  const Curve& c = poly.boundary;
  if (vertex >= c.size() || !(radius > 0.0)) {
    throw Error(ErrorKind::Domain, "descent perturbation needs a boundary vertex and radius > 0");
  }
  const SphereGrid& grid = m.grid();
  const Base base = m.base();
  const Vec3 x = c[vertex];
  const Vec3 normal = inner_normals(c)[vertex];
  const Vec3 inside = sphere_exp(x, normal * (1.5 * radius));
  const Vec3 outside = sphere_exp(x, normal * (-1.5 * radius));

  const Field b1 = bump_field(grid, base, x, radius);
  const Field b2 = bump_field(grid, base, inside, 0.45 * radius);
  const Field b3 = bump_field(grid, base, outside, 0.45 * radius);

  double max_edge = 0.0;
  for (double e : edge_lengths(c)) {
    max_edge = std::max(max_edge, e);
  }
  const double margin = 3.0 * std::max(grid.dtheta(), grid.dphi()) + max_edge;
  check_support(grid, b2, poly.indicator, 1.0, c, margin, "w2");
  check_support(grid, b3, poly.indicator, 0.0, c, margin, "w3");

  const double boundary_b1 = curve_integral(m, c, b1);
  if (!(boundary_b1 > 1e-14)) {
    throw Error(ErrorKind::Support, "w1 does not meet the boundary");
  }
  Field w1(grid.size());
  for (std::size_t k = 0; k < w1.size(); ++k) {
    w1[k] = -b1[k] / boundary_b1;
  }
  Field outside_weight(grid.size());
  for (std::size_t k = 0; k < w1.size(); ++k) {
    outside_weight[k] = 1.0 - poly.indicator[k];
  }
  const Field w1_in = product(poly.indicator, w1);
  const Field w1_out = product(outside_weight, w1);
  const double in1 = integrate_volume(m, std::span<const double>(w1_in));
  const double out1 = integrate_volume(m, std::span<const double>(w1_out));
  const double c2 = -in1 / integrate_volume(m, std::span<const double>(b2));
  const double c3 = -out1 / integrate_volume(m, std::span<const double>(b3));

  DescentPerturbation p;
  p.vertex = vertex;
  p.support_center = x;
  p.radius = radius;
  p.support_radius = 2.0 * radius;
  p.u.resize(grid.size());
  for (std::size_t k = 0; k < p.u.size(); ++k) {
    p.u[k] = w1[k] + c2 * b2[k] + c3 * b3[k];
  }
  const Field u_in = product(poly.indicator, p.u);
  p.constraint_residuals = {curve_integral(m, c, p.u) + 1.0,
                            integrate_volume(m, std::span<const double>(u_in)),
                            integrate_volume(m, std::span<const double>(p.u))};
  return p;
}

Field with_region_integral(const ConformalMetric& m, const Region& r,
                           const DescentPerturbation& p, double target) {
  const Region poly = polygon_region(m, r);
  const Vec3 normal = inner_normals(poly.boundary)[p.vertex];
  const Vec3 inside = sphere_exp(p.support_center, normal * (1.5 * p.radius));
  const Field b2 = bump_field(m.grid(), m.base(), inside, 0.45 * p.radius);
  const Field b2_in = product(poly.indicator, b2);
  const Field u_in = product(poly.indicator, p.u);
  const double scale = (target - integrate_volume(m, std::span<const double>(u_in))) /
                       integrate_volume(m, std::span<const double>(b2_in));
  Field out = p.u;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += scale * b2[k];
  }
  return out;
}

DescentPerturbation build_descent_perturbation(const ConformalMetric& m, const Region& r,
                                               std::size_t vertex) {
  double radius = 4.0 * std::max(m.grid().dtheta(), m.grid().dphi());
  for (;;) {
    try {
      return build_descent_perturbation(m, r, vertex, radius);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Support || radius >= kMaxDescentRadius) {
        throw;
      }
      radius = std::min(2.0 * radius, kMaxDescentRadius);
    }
  }
}

namespace {

// Root of the decreasing function g(s) = F(s, t) - v with |s| <= bound.
double solve_correction(const std::function<double(double)>& g, double slope_guess,
                        double bound) {
  constexpr double kTol = 1e-13;
  const double g0 = g(0.0);
  if (std::abs(g0) <= kTol) {
    return 0.0;
  }
  // g decreases in s, so the root lies on the side of sign(g0).
  const double dir = g0 > 0.0 ? 1.0 : -1.0;
  double near = 0.0;
  double g_near = g0;
  double far = std::min(bound, std::abs(g0 / slope_guess) * 1.5) * dir;
  double g_far = g(far);
  while (g_far * dir > 0.0) {
    if (std::abs(far) >= bound) {
      throw Error(ErrorKind::Correction, "volume correction root not bracketed in |s| <= 10|t|");
    }
    near = far;
    g_near = g_far;
    far = std::min(bound, 2.0 * std::abs(far)) * dir;
    g_far = g(far);
  }
  if (std::abs(g_far) <= kTol) {
    return far;
  }
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double s = near - g_near * (far - near) / (g_far - g_near);
    if (!(std::min(near, far) < s && s < std::max(near, far))) {
      s = 0.5 * (near + far);
    }
    const double gs = g(s);
    if (std::abs(gs) <= kTol || std::abs(far - near) < 1e-16) {
      return s;
    }
    if (gs * dir > 0.0) {
      near = s;
      g_near = gs;
      if (side == 1) {
        g_far *= 0.5;
      }
      side = 1;
    } else {
      far = s;
      g_far = gs;
      if (side == -1) {
        g_near *= 0.5;
      }
      side = -1;
    }
  }
  throw Error(ErrorKind::Correction, "volume correction did not converge");
}

template <class F>
void parallel_over(std::size_t n, F&& body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t q = 0; q < n; ++q) {
    try {
      body(q);
    } catch (...) {
      errors[q] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace

VolumeCorrection volume_correction(const ConformalMetric& m, const Region& r,
                                   std::span<const double> u, const NormalField& nf,
                                   std::optional<double> v, std::span<const double> t_samples) {
  const Region poly = polygon_region(m, r);
  const double target = v.value_or(poly.volume_fraction);
  VolumeCorrection out;
  out.samples.resize(t_samples.size());
  parallel_over(t_samples.size(), [&](std::size_t q) {
    const double t = t_samples[q];
    const ConformalMetric mt = m.perturbed(u, t);
    auto g = [&](double s) { return fraction_of(mt, displace(m, poly.boundary, nf, s)) - target; };
    out.samples[q] = {t, solve_correction(g, -1.0 / mt.total_volume(), 10.0 * std::abs(t))};
  });
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& cs : out.samples) {
    if (cs.s == 0.0 || cs.t == 0.0) {
      continue;
    }
    const double x = std::log(std::abs(cs.t));
    const double y = std::log(std::abs(cs.s));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n == 0) {
    out.exponent = std::numeric_limits<double>::infinity();
  } else if (n == 1 || sxx * n - sx * sx <= 0.0) {
    out.exponent = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

VariationReport descent_slope(const ConformalMetric& m, const Region& r, std::span<const double> u,
                              const NormalField& nf, std::optional<double> v,
                              std::span<const double> t_samples) {
  for (double t : t_samples) {
    if (!(t > 0.0)) {
      throw Error(ErrorKind::Domain, "slope samples must be positive");
    }
  }
  const Region poly = polygon_region(m, r);
  VariationReport rep;
  rep.conformal = first_variation_conformal(m, poly, u);
  try {
    rep.flow = first_variation_flow(m, poly, nf);
    rep.flow_checked = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Precondition) {
      throw;
    }
  }
  rep.correction = volume_correction(m, poly, u, nf, v, t_samples);
  rep.t_samples.assign(t_samples.begin(), t_samples.end());
  rep.lg_at_zero = curve_length(m, poly.boundary) / m.total_volume();
  rep.lg_values.resize(t_samples.size());
  parallel_over(t_samples.size(), [&](std::size_t q) {
    const ConformalMetric mt = m.perturbed(u, t_samples[q]);
    const Curve moved = displace(m, poly.boundary, nf, rep.correction.samples[q].s);
    rep.lg_values[q] = curve_length(mt, moved) / mt.total_volume();
  });

  // Difference quotients D(t) = (L(t) - L(0)) / t, extrapolated linearly to t = 0.
  const std::size_t n = t_samples.size();
  std::vector<double> d(n);
  for (std::size_t q = 0; q < n; ++q) {
    d[q] = (rep.lg_values[q] - rep.lg_at_zero) / t_samples[q];
  }
  if (n == 1) {
    rep.measured_slope = d[0];
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      sx += t_samples[q];
      sy += d[q];
      sxx += t_samples[q] * t_samples[q];
      sxy += t_samples[q] * d[q];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.measured_slope = (sy - b * sx) / n;
  }
  rep.richardson_slope = rep.measured_slope;
  const auto smallest = std::min_element(t_samples.begin(), t_samples.end()) - t_samples.begin();
  for (std::size_t q = 0; q < n; ++q) {
    if (std::abs(t_samples[q] - 2.0 * t_samples[smallest]) <= 1e-12 * t_samples[q]) {
      rep.richardson_slope = 2.0 * d[smallest] - d[q];
    }
  }
  rep.paper_bound = -1.0 / m.total_volume();
  rep.bound_satisfied =
      rep.measured_slope <= rep.paper_bound + 0.1 * std::abs(rep.paper_bound);
  return rep;
}

}  // namespace lglab
