#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lglab/vec3.hpp"

namespace lglab {

/// Cell-centered latitude/longitude lattice on the unit sphere.
///
/// Colatitudes are theta_i = (i + 1/2) pi / n_theta, so no node sits on a
/// pole; longitudes are phi_j = 2 pi j / n_phi. Node (i, j) has flat index
/// i * n_phi + j. n_phi must be even so that the antipodal map
/// (theta, phi) -> (pi - theta, phi + pi) sends nodes to nodes.
class SphereGrid {
 public:
  static constexpr int kMinTheta = 8;
  static constexpr int kMinPhi = 16;

  SphereGrid(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi_; }

  double dtheta() const { return M_PI / n_theta_; }
  double dphi() const { return 2.0 * M_PI / n_phi_; }
  double theta(int i) const { return (i + 0.5) * dtheta(); }
  double phi(int j) const { return j * dphi(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_phi_ + j; }
  int row(std::size_t k) const { return static_cast<int>(k / n_phi_); }
  int col(std::size_t k) const { return static_cast<int>(k % n_phi_); }

  Vec3 node(int i, int j) const { return from_spherical(theta(i), phi(j)); }
  Vec3 node(std::size_t k) const { return node(row(k), col(k)); }

  /// Unit tangent vectors along increasing theta and increasing phi.
  Vec3 e_theta(int i, int j) const;
  Vec3 e_phi(int j) const;

  std::size_t antipode(std::size_t k) const {
    return index(n_theta_ - 1 - row(k), (col(k) + n_phi_ / 2) % n_phi_);
  }

  /// Exact measure of cell i on the round sphere: the integral of
  /// sin(theta) over the cell's theta band, times dphi.
  double cell_area(int i) const { return cell_area_[i]; }
  const std::vector<double>& cell_areas() const { return cell_area_; }

  bool operator==(const SphereGrid& o) const {
    return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
  }

 private:
  int n_theta_;
  int n_phi_;
  std::vector<double> cell_area_;
};

/// Scalar field sampled on the nodes of a SphereGrid, flat-indexed.
using Field = std::vector<double>;

}  // namespace lglab
