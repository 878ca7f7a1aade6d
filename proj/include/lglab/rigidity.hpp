#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lglab/conformal_metric.hpp"
#include "lglab/region.hpp"
#include "lglab/variation.hpp"

namespace lglab {

enum class Admissibility { Admissible, Violated };
const char* to_string(Admissibility a);

/// Grid check of K(exp(2tu) g_hat) >= K over the listed t.
struct AdmissibilityCertificate {
  std::vector<double> t_checked;
  double min_slack = 0.0;  ///< min over nodes and t of K_t - K
  std::size_t witness_node = 0;
  double witness_t = 0.0;
  Admissibility verdict = Admissibility::Violated;
};

inline constexpr double kAdmissibilityTolerance = 1e-9;

/// Requires |t| <= 0.1 for every listed t.
AdmissibilityCertificate certify_admissibility(const ConformalMetric& m, std::span<const double> u,
                                               std::span<const double> t_list);

/// Largest t = 1e-3 * 2^k (k = 6, 5, ..., -40) whose certificate is admissible.
std::optional<double> admissible_step(const ConformalMetric& m, std::span<const double> u);

struct ScalingDescent {
  double v = 0.0;
  std::vector<double> t_samples;
  std::vector<double> lg_values;
  double derivative = 0.0;  ///< one-sided second-order difference at t = 0
  double expected = 0.0;    ///< -lg_functional(m, v)
  AdmissibilityCertificate certificate;
};

/// Deformation (1 + t)^2 g for a metric whose bound K is non-positive.
/// Throws a domain error when K > 0.
ScalingDescent scaling_descent_nonpositive_K(const ConformalMetric& m, double v = 0.5);

struct ProbePoint {
  double v = 0.0;
  std::size_t vertex = 0;
  Vec3 point;
  double slack = 0.0;
  std::string status;
};

struct DescentWitness {
  double v = 0.0;
  Region region;
  NormalField normal_field;
  DescentPerturbation perturbation;
  double t_star = 0.0;
  AdmissibilityCertificate certificate;
  std::vector<double> t_samples;
  VariationReport report;
};

enum class Conclusion { NoAdmissibleDescentFound, NotCritical };
const char* to_string(Conclusion c);

struct RigidityVerdict {
  std::vector<ProbePoint> probed_points;
  bool descent_found = false;
  std::optional<DescentWitness> descent_witness;
  Conclusion conclusion = Conclusion::NoAdmissibleDescentFound;
};

struct ProbeOptions {
  int points_per_volume = 16;
  double slack_threshold = 1e-3;
  bool refine = true;
  /// Lower bound on the normal-field radius used for the slope measurement.
  double normal_field_radius = 0.2;
};

/// Looks for an admissible conformal descent direction at boundary points of
/// the witnesses where the curvature bound is not attained. Finding none is
/// consistent with criticality; it does not prove it. Throws a precondition
/// error if m itself violates the bound.
RigidityVerdict rigidity_probe(const ConformalMetric& m, std::span<const double> volumes,
                               const ProbeOptions& options = {});

struct ConcentrationResult {
  std::vector<double> volumes;
  std::vector<double> distances;
  std::vector<Vec3> barycenters;
  std::size_t argmax_node = 0;
  Vec3 argmax_point;
  double max_curvature = 0.0;
  bool non_increasing = false;
};

/// Slack allowed between consecutive distances: d_next <= 1.1 d + half a cell.
inline constexpr double kConcentrationSlack = 0.1;

/// Distance from the witness barycenter to the curvature maximum for each
/// volume. Throws a precondition error if the maximum is not attained at a
/// single node.
ConcentrationResult small_volume_concentration(const ConformalMetric& m,
                                               std::span<const double> volumes,
                                               bool refine = true);

}  // namespace lglab
