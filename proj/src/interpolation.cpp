#include "lglab/interpolation.hpp"

#include <cmath>

namespace lglab {

std::array<double, 4> catmull_rom_weights(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}

std::array<double, 4> catmull_rom_derivative_weights(double t) {
  const double t2 = t * t;
  return {0.5 * (-3.0 * t2 + 4.0 * t - 1.0), 0.5 * (9.0 * t2 - 10.0 * t),
          0.5 * (-9.0 * t2 + 8.0 * t + 1.0), 0.5 * (3.0 * t2 - 2.0 * t)};
}

std::array<double, 4> lagrange_cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

Sample sample_field(const SphereGrid& grid, std::span<const double> f, double theta, double phi) {
  const int nphi = grid.n_phi();
  const double x = theta / grid.dtheta() - 0.5;
  const double xf = std::floor(x);
  const int i0 = static_cast<int>(xf);
  const double tx = x - xf;
  const double y = phi / grid.dphi();
  const double yf = std::floor(y);
  const int j0 = static_cast<int>(yf);
  const double ty = y - yf;

  const auto wx = catmull_rom_weights(tx);
  const auto dwx = catmull_rom_derivative_weights(tx);
  const auto wy = catmull_rom_weights(ty);
  const auto dwy = catmull_rom_derivative_weights(ty);

  Sample s;
  for (int a = 0; a < 4; ++a) {
    const RowRef r = wrap_row(grid, i0 - 1 + a);
    const double* row = f.data() + static_cast<std::size_t>(r.row) * nphi;
    double v = 0.0;
    double dv = 0.0;
    for (int b = 0; b < 4; ++b) {
      int j = (j0 - 1 + b + r.col_shift) % nphi;
      if (j < 0) {
        j += nphi;
      }
      v += wy[b] * row[j];
      dv += dwy[b] * row[j];
    }
    s.value += wx[a] * v;
    s.d_theta += dwx[a] * v;
    s.d_phi += wx[a] * dv;
  }
  s.d_theta /= grid.dtheta();
  s.d_phi /= grid.dphi();
  return s;
}

double sample_at(const SphereGrid& grid, std::span<const double> f, const Vec3& p,
                 Vec3* gradient) {
  double theta = 0.0;
  double phi = 0.0;
  to_spherical(p, theta, phi);
  const Sample s = sample_field(grid, f, theta, phi);
  if (gradient != nullptr) {
    const double st = std::sin(theta);
    const Vec3 e_t{std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -st};
    const Vec3 e_p{-std::sin(phi), std::cos(phi), 0.0};
    // Exact derivative of the interpolant; near a pole d_phi / sin(theta)
    // stays bounded only as far as the interpolant is smooth there.
    *gradient = e_t * s.d_theta + e_p * (st > 1e-300 ? s.d_phi / st : 0.0);
  }
  return s.value;
}

}  // namespace lglab
