#include <cmath>
#include <vector>

#include "lglab/kernels.hpp"

namespace lglab::kernels::omp {

void apply_stencil(const LaplacianOperator& op, std::span<const double> f, std::span<double> out) {
  const int nphi = op.grid().n_phi();
  const int nt = op.grid().n_theta();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i) {
    double* dst = out.data() + static_cast<std::size_t>(i) * nphi;
    for (int j = 0; j < nphi; ++j) {
      dst[j] = 0.0;
    }
    for (const StencilTap& tap : op.row_stencil(i)) {
      const double* src = f.data() + static_cast<std::size_t>(tap.row) * nphi;
      const int split = nphi - tap.col_offset;
      for (int j = 0; j < split; ++j) {
        dst[j] += tap.weight * src[j + tap.col_offset];
      }
      for (int j = split; j < nphi; ++j) {
        dst[j] += tap.weight * src[j + tap.col_offset - nphi];
      }
    }
  }
}

void gauss_curvature(std::span<const double> u, std::span<const double> lap_u,
                     std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = std::exp(-2.0 * u[k]) * (1.0 - lap_u[k]);
  }
}

double weighted_volume(const SphereGrid& grid, std::span<const double> u,
                       std::span<const double> weight) {
  const int nt = grid.n_theta();
  const int nphi = grid.n_phi();
  std::vector<double> rows(nt);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * nphi;
    double s = 0.0;
    for (int j = 0; j < nphi; ++j) {
      const double w = weight.empty() ? 1.0 : weight[base + j];
      s += w * std::exp(2.0 * u[base + j]);
    }
    rows[i] = s * grid.cell_area(i);
  }
  double total = 0.0;
  for (double r : rows) {
    total += r;
  }
  return total;
}

void distances_to(const SphereGrid& grid, const Vec3& center, std::span<double> out) {
  const int nt = grid.n_theta();
  const int nphi = grid.n_phi();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nphi; ++j) {
      out[grid.index(i, j)] = arc_distance(center, grid.node(i, j));
    }
  }
}

}  // namespace lglab::kernels::omp
