#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "lglab/conformal_metric.hpp"
#include "lglab/region.hpp"

namespace lglab {

/// Smooth compactly supported profile exp(-1/(1 - s^2)) for |s| < 1, else 0.
double mollifier(double s);

/// Normal speed phi on the boundary vertices of a region, a mollifier bump
/// about one vertex normalized so that the boundary integral of phi in the
/// conformal metric is 1. The vertex displacement for parameter s is
/// s * phi * (unit normal in the conformal metric), toward the inside.
struct NormalField {
  std::size_t vertex = 0;
  Vec3 support_center;
  double support_radius = 0.0;
  std::vector<double> phi;
};

NormalField make_normal_field(const ConformalMetric& m, const Curve& boundary, std::size_t vertex,
                              double radius);

/// Boundary moved by s * phi along the inner conformal unit normal.
Curve displace(const ConformalMetric& m, const Curve& boundary, const NormalField& nf, double s);

/// Regions are handled through their boundary polygon; cap regions are
/// converted so that all volumes in a variation come from one discretization.
Region polygon_region(const ConformalMetric& m, const Region& r);

struct ConformalVariation {
  double dV_dt = 0.0;  ///< 2 * integral of u over the region
  double dA_dt = 0.0;  ///< integral of u over the boundary
  double dV_dt_fd = 0.0;
  double dA_dt_fd = 0.0;
  double dVM_dt = 0.0;  ///< 2 * integral of u over the surface
  double dVM_dt_fd = 0.0;
};

inline constexpr double kConformalFdStep = 1e-3;
inline constexpr double kFlowFdStep = 1e-3;

/// First variation of volume and boundary length along exp(2tu) g_hat.
/// Throws a formula-validation error if a central difference at t = +-1e-3
/// disagrees with the analytic value by more than max(1e-4, 1e-2 |value|).
ConformalVariation first_variation_conformal(const ConformalMetric& m, const Region& r,
                                             std::span<const double> u);

struct FlowVariation {
  double dV_ds = 0.0;
  double dA_ds = 0.0;
  double lambda = 0.0;  ///< length-weighted mean geodesic curvature
  double dV_ds_fd = 0.0;
  double dA_ds_fd = 0.0;
};

/// First variation along the normal flow of nf. Precondition: the boundary
/// curvature is constant within 1e-2. Throws a formula-validation error if
/// the Richardson-extrapolated central differences (steps 1e-3 and 5e-4)
/// disagree by more than 1e-3.
FlowVariation first_variation_flow(const ConformalMetric& m, const Region& r,
                                   const NormalField& nf);

/// u = w1 + w2 + w3 with boundary integral -1 and zero integral over the
/// region and over the surface, supported in the ball of radius 2r about
/// the chosen boundary vertex.
struct DescentPerturbation {
  Field u;
  std::size_t vertex = 0;
  Vec3 support_center;
  double radius = 0.0;          ///< r
  double support_radius = 0.0;  ///< 2r
  /// (boundary integral + 1, region integral, surface integral)
  std::array<double, 3> constraint_residuals{};
};

DescentPerturbation build_descent_perturbation(const ConformalMetric& m, const Region& r,
                                               std::size_t vertex, double radius);

/// Starts from 4 grid cells and doubles the radius on support errors, up to 0.3.
DescentPerturbation build_descent_perturbation(const ConformalMetric& m, const Region& r,
                                               std::size_t vertex);

inline constexpr double kMaxDescentRadius = 0.3;

/// Negative control: p.u plus a multiple of the interior bump w2's profile,
/// chosen so that the integral over the region equals `target` instead of 0.
Field with_region_integral(const ConformalMetric& m, const Region& r,
                           const DescentPerturbation& p, double target);

struct CorrectionSample {
  double t = 0.0;
  double s = 0.0;
};

struct VolumeCorrection {
  std::vector<CorrectionSample> samples;
  /// Least-squares slope of log|s| against log|t| over samples with s != 0;
  /// infinity when every sample has s = 0.
  double exponent = 0.0;
};

inline const std::vector<double> kDefaultCorrectionTimes = {-1e-2, -5e-3, -2.5e-3,
                                                            2.5e-3, 5e-3, 1e-2};
inline const std::vector<double> kDefaultSlopeTimes = {2.5e-3, 5e-3, 1e-2};

/// Solves V_t(Phi_s(region)) / V_t(M) = v for s at each t, where V_t is the
/// volume of exp(2 t u) g_hat. v defaults to the fraction of the boundary
/// polygon itself, which makes s(0) = 0 exactly. Throws a correction error if no root lies
/// in |s| <= 10 |t|. Roots are solved to 1e-13 in fraction.
VolumeCorrection volume_correction(const ConformalMetric& m, const Region& r,
                                   std::span<const double> u, const NormalField& nf,
                                   std::optional<double> v = std::nullopt,
                                   std::span<const double> t_samples = kDefaultCorrectionTimes);

struct VariationReport {
  ConformalVariation conformal;
  FlowVariation flow;
  bool flow_checked = false;  ///< false when the boundary curvature is not constant
  VolumeCorrection correction;
  std::vector<double> t_samples;
  std::vector<double> lg_values;  ///< normalized transported area at each t
  double lg_at_zero = 0.0;
  double measured_slope = 0.0;
  double richardson_slope = 0.0;
  double paper_bound = 0.0;  ///< -1 / V(M)
  bool bound_satisfied = false;
};

/// Measures the one-sided slope at t = 0 of the normalized length of the
/// volume-corrected transported boundary. bound_satisfied holds when the
/// slope is at most paper_bound + 0.1 |paper_bound|.
VariationReport descent_slope(const ConformalMetric& m, const Region& r, std::span<const double> u,
                              const NormalField& nf, std::optional<double> v = std::nullopt,
                              std::span<const double> t_samples = kDefaultSlopeTimes);

}  // namespace lglab
