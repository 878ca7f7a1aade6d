#pragma once

#include <span>
#include <vector>

#include "lglab/laplacian.hpp"
#include "lglab/sphere_grid.hpp"

/// Data-parallel grid kernels. Each kernel has a serial reference in
/// kernels::serial and an OpenMP version in kernels::omp; the two produce
/// bitwise-identical results (reductions go through per-row partial sums
/// that are added in row order), which the tests check.
namespace lglab::kernels {

namespace serial {

void apply_stencil(const LaplacianOperator& op, std::span<const double> f, std::span<double> out);

/// out = exp(-2u) (1 - lap_u): Gauss curvature of exp(2u) g_round.
void gauss_curvature(std::span<const double> u, std::span<const double> lap_u,
                     std::span<double> out);

/// Sum over nodes of weight * exp(2u) * cell_area (weight may be empty for 1).
double weighted_volume(const SphereGrid& grid, std::span<const double> u,
                       std::span<const double> weight);

/// Great-circle distance from center to every node.
void distances_to(const SphereGrid& grid, const Vec3& center, std::span<double> out);

}  // namespace serial

namespace omp {

void apply_stencil(const LaplacianOperator& op, std::span<const double> f, std::span<double> out);
void gauss_curvature(std::span<const double> u, std::span<const double> lap_u,
                     std::span<double> out);
double weighted_volume(const SphereGrid& grid, std::span<const double> u,
                       std::span<const double> weight);
void distances_to(const SphereGrid& grid, const Vec3& center, std::span<double> out);

}  // namespace omp

}  // namespace lglab::kernels
