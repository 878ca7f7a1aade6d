#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lglab/conformal_metric.hpp"
#include "lglab/region.hpp"

namespace lglab {

/// Sphere metric with the same (even) conformal factor as a projective-plane
/// metric. Checks that the volume doubles (within 1e-9) and that the
/// curvature field is unchanged; throws a domain error for a sphere input.
ConformalMetric lift_metric(const ConformalMetric& m);

/// A region of the projective plane and the two components of its preimage.
/// The second component is the antipodal relabeling of the first, node by node.
struct LiftedRegion {
  std::array<Region, 2> upstairs;
  Region downstairs;
  double separation = 0.0;  ///< min geodesic distance between the component boundaries
  std::array<double, 2> upstairs_fraction{};
  std::array<double, 2> upstairs_area{};
  double downstairs_fraction = 0.0;
  double downstairs_area = 0.0;
  std::string warning;
};

/// Requires a downstairs fraction in (0, 1/2] and a region that is not a
/// complement (whose preimage would be connected).
LiftedRegion lift_region(const ConformalMetric& m, const Region& r);

struct FactorEntry {
  double v = 0.0;
  double downstairs_value = 0.0;  ///< A(boundary) / V(RP^2)
  double upstairs_value = 0.0;    ///< A(boundary of one component) / V(S^2)
  double ratio = 0.0;             ///< upstairs / downstairs, expected 1/2
  double upstairs_fraction = 0.0; ///< expected v / 2
  double separation = 0.0;
  bool pass = false;
};

struct FactorReport {
  std::vector<FactorEntry> entries;
  bool pass = false;
};

inline constexpr double kFactorTolerance = 1e-6;

/// For each v, transports the projective-plane witness to the sphere and
/// compares the per-component functional with half the quotient functional.
FactorReport factor_relation_check(const ConformalMetric& m, std::span<const double> volumes,
                                   bool refine = true);

}  // namespace lglab
