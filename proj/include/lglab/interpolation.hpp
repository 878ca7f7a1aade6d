#pragma once

#include <array>
#include <span>

#include "lglab/sphere_grid.hpp"

namespace lglab {

/// Value and coordinate partials of an interpolated field.
struct Sample {
  double value = 0.0;
  double d_theta = 0.0;
  double d_phi = 0.0;
};

/// Maps an extended row index (possibly beyond a pole) to a grid row and the
/// longitude shift, in columns, that the across-pole continuation implies:
/// f(-theta, phi) = f(theta, phi + pi).
struct RowRef {
  int row;
  int col_shift;
};

inline RowRef wrap_row(const SphereGrid& grid, int extended_row) {
  const int nt = grid.n_theta();
  if (extended_row < 0) {
    return {-1 - extended_row, grid.n_phi() / 2};
  }
  if (extended_row >= nt) {
    return {2 * nt - 1 - extended_row, grid.n_phi() / 2};
  }
  return {extended_row, 0};
}

/// Catmull-Rom weights for nodes -1, 0, 1, 2 at parameter t in [0, 1).
std::array<double, 4> catmull_rom_weights(double t);
std::array<double, 4> catmull_rom_derivative_weights(double t);

/// Cubic Lagrange weights for nodes -1, 0, 1, 2 at parameter t in [0, 1).
std::array<double, 4> lagrange_cubic_weights(double t);

/// C1 bicubic (Catmull-Rom) interpolation of a grid field at (theta, phi),
/// with the across-pole continuation for rows outside [0, n_theta).
Sample sample_field(const SphereGrid& grid, std::span<const double> f, double theta, double phi);

/// Same, at a point on the unit sphere; also returns the tangent gradient of
/// the interpolant in Euclidean coordinates.
double sample_at(const SphereGrid& grid, std::span<const double> f, const Vec3& p,
                 Vec3* gradient = nullptr);

}  // namespace lglab
