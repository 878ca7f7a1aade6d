#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lglab/conformal_metric.hpp"
#include "lglab/region.hpp"

namespace lglab {

struct ProfileSample {
  double v = 0.0;
  double area = 0.0;
  double normalized = 0.0;  ///< area / total volume
  std::optional<Region> witness;
  bool refined = false;
  std::string error;  ///< non-empty if no candidate could be built for v
};

/// Sampled isoperimetric profile. For non-round metrics the values are upper
/// bounds: the infimum is only taken over the candidate family.
struct ProfileCurve {
  Base base = Base::Sphere;
  double total_volume = 0.0;
  std::vector<ProfileSample> samples;  ///< sorted by v
};

struct SweepOptions {
  int center_stride = 8;           ///< centers on every stride-th node in both directions
  double fraction_tolerance = 1e-8;
  int boundary_vertices = kCapBoundaryVertices;
};

/// Lower envelope of boundary length over round-metric geodesic caps (and
/// their complements) of each prescribed volume fraction. Caps are centered
/// on a sub-lattice of the grid (the upper hemisphere on the projective
/// plane) and the aperture is solved for the fraction. Parallel over centers.
ProfileCurve cap_sweep(const ConformalMetric& m, std::span<const double> volumes,
                       const SweepOptions& options = {});

struct RefineOptions {
  double curvature_tolerance = 1e-3;
  int max_steps = 20000;
  double controller_gain = 1.0;
  double fraction_tolerance = 1e-6;
  double step_factor = 0.25;
  int remeasure_every = 100;
  int resample_every = 50;
};

struct RefineResult {
  Region region;
  bool converged = false;
  bool self_intersection = false;
  bool improved = false;  ///< false if the input was returned unchanged
  int steps = 0;
  double max_deviation = 0.0;  ///< max |k - mean k| at exit
  double initial_area = 0.0;
  double final_area = 0.0;
  std::string warning;
};

/// Constrained flow of the boundary by normal speed (k - mean k) in the
/// conformal metric, plus a proportional volume controller. Ends with a
/// normal-offset bisection that pins the volume fraction to v. Never returns
/// a region with a longer boundary than the input.
RefineResult curve_flow_refine(const ConformalMetric& m, const Region& r, double v,
                               const RefineOptions& options = {});

struct LgValue {
  double value = 0.0;  ///< normalized minimal area found
  double sweep_value = 0.0;
  Region witness;
  bool refined = false;
  bool converged = false;
};

/// Levy-Gromov functional I(v) / V(M): sweep followed (optionally) by flow refinement.
LgValue lg_functional(const ConformalMetric& m, double v, bool refine = true,
                      const SweepOptions& sweep = {}, const RefineOptions& flow = {});

/// Batch form sharing one sweep; results follow the sorted volumes.
std::vector<LgValue> lg_functional(const ConformalMetric& m, std::span<const double> volumes,
                                   bool refine = true, const SweepOptions& sweep = {},
                                   const RefineOptions& flow = {});

/// Normalized profile of the round sphere of curvature K.
double model_profile(double v, double K);

struct LevyGromovEntry {
  double v = 0.0;
  double value = 0.0;
  double model = 0.0;
  double margin = 0.0;
};

struct LevyGromovReport {
  double curvature_min = 0.0;
  double K = 0.0;
  std::vector<LevyGromovEntry> entries;
  double min_margin = 0.0;
  bool pass = false;
};

inline constexpr double kHypothesisSlack = 1e-9;
inline constexpr double kMarginTolerance = 1e-6;

/// Compares lg_functional with the model sphere of curvature K. Throws a
/// precondition error if the metric's Gauss curvature dips below K - 1e-9.
LevyGromovReport check_levy_gromov(const ConformalMetric& m, std::span<const double> volumes,
                                   bool refine = true);

}  // namespace lglab
