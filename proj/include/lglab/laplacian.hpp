#pragma once

#include <span>
#include <vector>

#include "lglab/sphere_grid.hpp"

namespace lglab {

struct StencilTap {
  int row;
  int col_offset;
  double weight;
};

/// Round-sphere Laplace-Beltrami operator as a per-row linear stencil. All
/// nodes of a row share the same taps up to a longitude shift.
///
/// Rows away from the poles use second-order central differences of the
/// divergence form. Rows with colatitude inside the polar caps, where the
/// coordinate singularity spoils the central-difference truncation error,
/// use a spherical-mean stencil: circle averages at radii h and 2h
/// (interpolated with cubic Lagrange weights through the across-pole
/// continuation) combined by Richardson extrapolation.
class LaplacianOperator {
 public:
  static constexpr double kDefaultPolarCap = 0.35;
  static constexpr int kCircleSamples = 8;

  explicit LaplacianOperator(const SphereGrid& grid, double polar_cap = kDefaultPolarCap);

  const SphereGrid& grid() const { return grid_; }
  const std::vector<StencilTap>& row_stencil(int i) const { return rows_[i]; }
  bool is_polar_row(int i) const { return polar_[i]; }

  void apply(std::span<const double> f, std::span<double> out) const;
  Field apply(std::span<const double> f) const;

 private:
  SphereGrid grid_;
  std::vector<std::vector<StencilTap>> rows_;
  std::vector<bool> polar_;
};

/// Shared operator for a grid, built on first use (thread-safe).
const LaplacianOperator& laplacian_operator(const SphereGrid& grid);

}  // namespace lglab
