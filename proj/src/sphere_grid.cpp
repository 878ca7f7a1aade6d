#include "lglab/sphere_grid.hpp"

#include <string>

#include "lglab/error.hpp"

namespace lglab {

SphereGrid::SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < kMinTheta || n_phi < kMinPhi) {
    throw Error(ErrorKind::Resolution, "grid " + std::to_string(n_theta) + "x" +
                                           std::to_string(n_phi) + " is below the 8x16 minimum");
  }
  if (n_phi % 2 != 0) {
    throw Error(ErrorKind::Resolution, "n_phi must be even for the antipodal map");
  }
  cell_area_.resize(n_theta);
  const double half = 0.5 * dtheta();
  for (int i = 0; i < n_theta; ++i) {
    cell_area_[i] = 2.0 * std::sin(theta(i)) * std::sin(half) * dphi();
  }
}

Vec3 SphereGrid::e_theta(int i, int j) const {
  const double t = theta(i);
  const double p = phi(j);
  return {std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t)};
}

Vec3 SphereGrid::e_phi(int j) const {
  const double p = phi(j);
  return {-std::sin(p), std::cos(p), 0.0};
}

}  // namespace lglab
