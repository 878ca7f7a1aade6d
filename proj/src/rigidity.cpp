#include "lglab/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/interpolation.hpp"
#include "lglab/isoperimetry.hpp"

namespace lglab {

const char* to_string(Admissibility a) {
  return a == Admissibility::Admissible ? "Admissible" : "Violated";
}

const char* to_string(Conclusion c) {
  return c == Conclusion::NotCritical ? "NotCritical" : "NoAdmissibleDescentFound";
}

AdmissibilityCertificate certify_admissibility(const ConformalMetric& m, std::span<const double> u,
                                               std::span<const double> t_list) {
  if (u.size() != m.grid().size()) {
    throw Error(ErrorKind::Domain, "perturbation does not match the grid");
  }
  AdmissibilityCertificate cert;
  cert.t_checked.assign(t_list.begin(), t_list.end());
  cert.min_slack = std::numeric_limits<double>::infinity();
  Field combined(u.size());
  for (double t : t_list) {
    if (!(std::abs(t) <= 0.1)) {
      throw Error(ErrorKind::Domain, "admissibility is only certified for |t| <= 0.1");
    }
    for (std::size_t k = 0; k < u.size(); ++k) {
      combined[k] = m.u()[k] + t * u[k];
    }
    const CurvatureField kf = gauss_curvature(m.grid(), combined);
    const double slack = kf.min_value - m.K();
    if (slack < cert.min_slack) {
      cert.min_slack = slack;
      cert.witness_node = kf.argmin;
      cert.witness_t = t;
    }
  }
  cert.verdict = cert.min_slack >= -kAdmissibilityTolerance ? Admissibility::Admissible
                                                            : Admissibility::Violated;
  return cert;
}

std::optional<double> admissible_step(const ConformalMetric& m, std::span<const double> u) {
  for (int k = 6; k >= -40; --k) {
    const double t = std::ldexp(1e-3, k);
    const double ts[1] = {t};
    if (certify_admissibility(m, u, ts).verdict == Admissibility::Admissible) {
      return t;
    }
  }
  return std::nullopt;
}

ScalingDescent scaling_descent_nonpositive_K(const ConformalMetric& m, double v) {
  if (m.K() > 0.0) {
    throw Error(ErrorKind::Domain, "scaling descent needs a non-positive curvature bound");
  }
  ScalingDescent out;
  out.v = v;
  // (1 + t)^2 g = exp(2 log(1 + t)) g: a constant direction with parameter log(1 + t).
  const Field ones(m.grid().size(), 1.0);
  std::vector<double> log_steps;
  for (double t : {0.0, 1e-3, 2e-3, 1e-2, 5e-2, 0.1}) {
    log_steps.push_back(std::log1p(t));
  }
  out.certificate = certify_admissibility(m, ones, log_steps);

  const double h = 1e-3;
  out.t_samples = {0.0, h, 2.0 * h};
  for (double t : out.t_samples) {
    out.lg_values.push_back(lg_functional(m.shifted(std::log1p(t)), v).value);
  }
  out.derivative = (-3.0 * out.lg_values[0] + 4.0 * out.lg_values[1] - out.lg_values[2]) / (2.0 * h);
  out.expected = -out.lg_values[0];
  return out;
}

namespace {

std::vector<double> slope_times(double t_star) {
  return {0.25 * t_star, 0.5 * t_star, t_star};
}

std::vector<double> certified_times(double t_star) {
  return {t_star / 16.0, t_star / 8.0, t_star / 4.0, t_star / 2.0, t_star};
}

}  // namespace

RigidityVerdict rigidity_probe(const ConformalMetric& m, std::span<const double> volumes,
                               const ProbeOptions& options) {
  const SphereGrid& grid = m.grid();
  const Field zero(grid.size(), 0.0);
  const double t0[1] = {0.0};
  const AdmissibilityCertificate base = certify_admissibility(m, zero, t0);
  if (base.verdict != Admissibility::Admissible) {
    throw Error(ErrorKind::Precondition, "the metric violates its own curvature bound (slack " +
                                             std::to_string(base.min_slack) + ")");
  }
  const CurvatureField curvature = gauss_curvature(m);

  RigidityVerdict verdict;
  for (double v : volumes) {
    const LgValue lg = lg_functional(m, v, options.refine);
    const Region region = polygon_region(m, lg.witness);
    const Curve& c = region.boundary;
    const int n_points = std::max(1, options.points_per_volume);
    for (int q = 0; q < n_points; ++q) {
      ProbePoint pp;
      pp.v = v;
      pp.vertex = static_cast<std::size_t>(q) * c.size() / n_points;
      pp.point = c[pp.vertex];
      pp.slack = sample_at(grid, curvature.values, pp.point) - m.K();
      if (!(pp.slack > options.slack_threshold)) {
        pp.status = "no slack";
        verdict.probed_points.push_back(std::move(pp));
        continue;
      }
      if (verdict.descent_found) {
        pp.status = "not needed";
        verdict.probed_points.push_back(std::move(pp));
        continue;
      }
      try {
        DescentPerturbation p = build_descent_perturbation(m, region, pp.vertex);
        double support_slack = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < grid.size(); ++k) {
          if (p.u[k] != 0.0) {
            support_slack = std::min(support_slack, curvature.values[k] - m.K());
          }
        }
        if (!(support_slack > options.slack_threshold)) {
          pp.status = "support leaves the slack region";
          verdict.probed_points.push_back(std::move(pp));
          continue;
        }
        const auto t_star = admissible_step(m, p.u);
        if (!t_star) {
          pp.status = "no admissible step";
          verdict.probed_points.push_back(std::move(pp));
          continue;
        }
        const std::vector<double> ts = slope_times(*t_star);
        const std::vector<double> checked = certified_times(*t_star);
        AdmissibilityCertificate cert = certify_admissibility(m, p.u, checked);
        NormalField nf = make_normal_field(m, c, pp.vertex,
                                           std::max(options.normal_field_radius, p.radius));
        VariationReport rep = descent_slope(m, region, p.u, nf, std::nullopt, ts);
        if (cert.verdict == Admissibility::Admissible && rep.measured_slope < 0.0) {
          pp.status = "descent";
          verdict.descent_found = true;
          verdict.descent_witness = DescentWitness{v,  region, std::move(nf), std::move(p), *t_star,
                                                   std::move(cert), ts, std::move(rep)};
        } else {
          pp.status = "no descent";
        }
      } catch (const Error& e) {
        pp.status = std::string("skipped: ") + e.what();
      }
      verdict.probed_points.push_back(std::move(pp));
    }
  }
  verdict.conclusion =
      verdict.descent_found ? Conclusion::NotCritical : Conclusion::NoAdmissibleDescentFound;
  return verdict;
}

ConcentrationResult small_volume_concentration(const ConformalMetric& m,
                                               std::span<const double> volumes, bool refine) {
  const SphereGrid& grid = m.grid();
  const CurvatureField curvature = gauss_curvature(m);
  const double cutoff = curvature.max_value - 1e-9 * std::max(1.0, std::abs(curvature.max_value));
  std::size_t count = 0;
  for (double k : curvature.values) {
    count += k >= cutoff ? 1 : 0;
  }
  // On the projective plane the lift carries every maximum twice.
  const std::size_t allowed = m.base() == Base::ProjectivePlane ? 2 : 1;
  if (count > allowed) {
    throw Error(ErrorKind::Precondition, "curvature maximum is not unique on the grid");
  }
  ConcentrationResult out;
  out.argmax_node = curvature.argmax;
  out.argmax_point = grid.node(curvature.argmax);
  out.max_curvature = curvature.max_value;
  out.volumes.assign(volumes.begin(), volumes.end());
  for (double v : volumes) {
    const LgValue lg = lg_functional(m, v, refine);
    const Vec3 b = barycenter(m, lg.witness);
    double d = arc_distance(b, out.argmax_point);
    if (m.base() == Base::ProjectivePlane) {
      d = std::min(d, M_PI - d);
    }
    out.barycenters.push_back(b);
    out.distances.push_back(d);
  }
  const double floor = 0.5 * std::max(grid.dtheta(), grid.dphi());
  out.non_increasing = true;
  for (std::size_t q = 1; q < out.distances.size(); ++q) {
    if (out.distances[q] > (1.0 + kConcentrationSlack) * out.distances[q - 1] + floor) {
      out.non_increasing = false;
    }
  }
  return out;
}

}  // namespace lglab
