#pragma once

#include <span>

#include "lglab/sphere_grid.hpp"

namespace lglab {

enum class Base { Sphere, ProjectivePlane };

const char* to_string(Base base);

/// A conformal deformation g_hat = exp(2u) g of the unit round sphere, or of
/// its antipodal quotient, sampled on a SphereGrid.
///
/// The projective plane is carried by its even lift: u must satisfy
/// u(theta, phi) = u(pi - theta, phi + pi) at every node. Inputs that are even
/// to within 1e-12 are symmetrized exactly; anything worse is rejected.
/// K is the target lower bound for the Gauss curvature, not the curvature of
/// the metric itself.
class ConformalMetric {
 public:
  static constexpr double kEvennessTolerance = 1e-12;

  ConformalMetric(Base base, SphereGrid grid, Field u, double K);

  static ConformalMetric round(Base base, const SphereGrid& grid, double K = 1.0);

  Base base() const { return base_; }
  const SphereGrid& grid() const { return grid_; }
  const Field& u() const { return u_; }
  double K() const { return K_; }

  /// Metric exp(2 (u + t w)) g on the same base with the same K.
  ConformalMetric perturbed(std::span<const double> w, double t) const;
  /// Metric exp(2 (u + c)) g, i.e. a constant rescaling by exp(c).
  ConformalMetric shifted(double c) const;
  ConformalMetric with_K(double K) const;

  /// Total volume of the surface (the quotient for ProjectivePlane).
  double total_volume() const { return total_volume_; }

 private:
  Base base_;
  SphereGrid grid_;
  Field u_;
  double K_;
  double total_volume_;
};

}  // namespace lglab
