#include "lglab/laplacian.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "lglab/interpolation.hpp"
#include "lglab/kernels.hpp"

namespace lglab {

namespace {

int wrap_col(int c, int n) {
  c %= n;
  return c < 0 ? c + n : c;
}

using TapMap = std::map<std::pair<int, int>, double>;

void add_tap(TapMap& taps, int row, int col, double w, int nphi) {
  taps[{row, wrap_col(col, nphi)}] += w;
}

std::vector<StencilTap> central_difference_row(const SphereGrid& grid, int i) {
  const double h = grid.dtheta();
  const double dp = grid.dphi();
  const double t = grid.theta(i);
  const double s = std::sin(t);
  const double sp = std::sin(t + 0.5 * h);
  const double sm = std::sin(t - 0.5 * h);
  const double up = sp / (h * h * s);
  const double down = sm / (h * h * s);
  const double side = 1.0 / (dp * dp * s * s);
  const int nphi = grid.n_phi();

  TapMap taps;
  const RowRef below = wrap_row(grid, i - 1);
  const RowRef above = wrap_row(grid, i + 1);
  add_tap(taps, below.row, below.col_shift, down, nphi);
  add_tap(taps, above.row, above.col_shift, up, nphi);
  add_tap(taps, i, -1, side, nphi);
  add_tap(taps, i, 1, side, nphi);
  add_tap(taps, i, 0, -(up + down) - 2.0 * side, nphi);

  std::vector<StencilTap> out;
  for (const auto& [key, w] : taps) {
    out.push_back({key.first, key.second, w});
  }
  return out;
}

// Spherical mean value property: the mean of f over the geodesic circle of
// radius rho is f + lap f (1 - cos rho) / 2 + O(rho^4), exactly so for
// degree-1 harmonics. Two radii and a Richardson step cancel the rho^2 term.
std::vector<StencilTap> spherical_mean_row(const SphereGrid& grid, int i) {
  const int nphi = grid.n_phi();
  const double h = grid.dtheta();
  const Vec3 p = grid.node(i, 0);
  const Vec3 et = grid.e_theta(i, 0);
  const Vec3 ep = grid.e_phi(0);
  const int ns = LaplacianOperator::kCircleSamples;

  TapMap taps;
  const double radii[2] = {h, 2.0 * h};
  const double richardson[2] = {4.0 / 3.0, -1.0 / 3.0};
  double center = 0.0;
  for (int r = 0; r < 2; ++r) {
    const double rho = radii[r];
    const double one_minus_cos = 2.0 * std::sin(0.5 * rho) * std::sin(0.5 * rho);
    const double coef = richardson[r] * 2.0 / one_minus_cos;
    center -= coef;
    for (int k = 0; k < ns; ++k) {
      const double a = 2.0 * M_PI * (k + 0.5) / ns;
      const Vec3 q = normalized(p * std::cos(rho) +
                                (et * std::cos(a) + ep * std::sin(a)) * std::sin(rho));
      double theta = 0.0;
      double phi = 0.0;
      to_spherical(q, theta, phi);
      if (phi > M_PI) {
        phi -= 2.0 * M_PI;
      }
      const double x = theta / h - 0.5;
      const double xf = std::floor(x);
      const double y = phi / grid.dphi();
      const double yf = std::floor(y);
      const auto wx = lagrange_cubic_weights(x - xf);
      const auto wy = lagrange_cubic_weights(y - yf);
      for (int ia = 0; ia < 4; ++ia) {
        const RowRef rr = wrap_row(grid, static_cast<int>(xf) - 1 + ia);
        for (int jb = 0; jb < 4; ++jb) {
          const int col = static_cast<int>(yf) - 1 + jb + rr.col_shift;
          add_tap(taps, rr.row, col, coef / ns * wx[ia] * wy[jb], nphi);
        }
      }
    }
  }
  add_tap(taps, i, 0, center, nphi);

  std::vector<StencilTap> out;
  for (const auto& [key, w] : taps) {
    if (w != 0.0) {
      out.push_back({key.first, key.second, w});
    }
  }
  return out;
}

}  // namespace

LaplacianOperator::LaplacianOperator(const SphereGrid& grid, double polar_cap)
    : grid_(grid), rows_(grid.n_theta()), polar_(grid.n_theta(), false) {
  for (int i = 0; i < grid.n_theta(); ++i) {
    const double t = grid.theta(i);
    polar_[i] = t < polar_cap || t > M_PI - polar_cap;
    rows_[i] = polar_[i] ? spherical_mean_row(grid, i) : central_difference_row(grid, i);
  }
}

void LaplacianOperator::apply(std::span<const double> f, std::span<double> out) const {
  kernels::omp::apply_stencil(*this, f, out);
}

Field LaplacianOperator::apply(std::span<const double> f) const {
  Field out(grid_.size());
  apply(f, out);
  return out;
}

const LaplacianOperator& laplacian_operator(const SphereGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<LaplacianOperator>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{grid.n_theta(), grid.n_phi()}];
  if (!slot) {
    slot = std::make_unique<LaplacianOperator>(grid);
  }
  return *slot;
}

}  // namespace lglab
