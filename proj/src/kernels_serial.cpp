#include <cmath>

#include "lglab/kernels.hpp"

namespace lglab::kernels::serial {

namespace {

void stencil_row(const LaplacianOperator& op, int i, std::span<const double> f, double* out) {
  const int nphi = op.grid().n_phi();
  for (int j = 0; j < nphi; ++j) {
    out[j] = 0.0;
  }
  for (const StencilTap& tap : op.row_stencil(i)) {
    const double* src = f.data() + static_cast<std::size_t>(tap.row) * nphi;
    const int split = nphi - tap.col_offset;
    for (int j = 0; j < split; ++j) {
      out[j] += tap.weight * src[j + tap.col_offset];
    }
    for (int j = split; j < nphi; ++j) {
      out[j] += tap.weight * src[j + tap.col_offset - nphi];
    }
  }
}

double row_volume(const SphereGrid& grid, int i, std::span<const double> u,
                  std::span<const double> weight) {
  const int nphi = grid.n_phi();
  const std::size_t base = static_cast<std::size_t>(i) * nphi;
  double s = 0.0;
  for (int j = 0; j < nphi; ++j) {
    const double w = weight.empty() ? 1.0 : weight[base + j];
    s += w * std::exp(2.0 * u[base + j]);
  }
  return s * grid.cell_area(i);
}

}  // namespace

void apply_stencil(const LaplacianOperator& op, std::span<const double> f, std::span<double> out) {
  const int nphi = op.grid().n_phi();
  for (int i = 0; i < op.grid().n_theta(); ++i) {
    stencil_row(op, i, f, out.data() + static_cast<std::size_t>(i) * nphi);
  }
}

void gauss_curvature(std::span<const double> u, std::span<const double> lap_u,
                     std::span<double> out) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[k] = std::exp(-2.0 * u[k]) * (1.0 - lap_u[k]);
  }
}

double weighted_volume(const SphereGrid& grid, std::span<const double> u,
                       std::span<const double> weight) {
  double total = 0.0;
  for (int i = 0; i < grid.n_theta(); ++i) {
    total += row_volume(grid, i, u, weight);
  }
  return total;
}

void distances_to(const SphereGrid& grid, const Vec3& center, std::span<double> out) {
  for (int i = 0; i < grid.n_theta(); ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      out[grid.index(i, j)] = arc_distance(center, grid.node(i, j));
    }
  }
}

}  // namespace lglab::kernels::serial
