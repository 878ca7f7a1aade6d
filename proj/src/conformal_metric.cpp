#include "lglab/conformal_metric.hpp"

#include <cmath>
#include <string>

#include "lglab/error.hpp"
#include "lglab/kernels.hpp"

namespace lglab {

const char* to_string(Base base) {
  return base == Base::Sphere ? "sphere" : "rp2";
}

ConformalMetric::ConformalMetric(Base base, SphereGrid grid, Field u, double K)
    : base_(base), grid_(std::move(grid)), u_(std::move(u)), K_(K) {
  if (u_.size() != grid_.size()) {
    throw Error(ErrorKind::Domain, "conformal factor size does not match the grid");
  }
  for (double v : u_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Domain, "conformal factor is not finite");
    }
  }
  if (!std::isfinite(K_)) {
    throw Error(ErrorKind::Domain, "curvature bound K is not finite");
  }
  if (base_ == Base::ProjectivePlane) {
    double worst = 0.0;
    for (std::size_t k = 0; k < u_.size(); ++k) {
      worst = std::max(worst, std::abs(u_[k] - u_[grid_.antipode(k)]));
    }
    if (worst > kEvennessTolerance) {
      throw Error(ErrorKind::Symmetry, "conformal factor is not antipodally even (deviation " +
                                           std::to_string(worst) + ")");
    }
    for (std::size_t k = 0; k < u_.size(); ++k) {
      const std::size_t a = grid_.antipode(k);
      if (k < a) {
        const double mean = 0.5 * (u_[k] + u_[a]);
        u_[k] = mean;
        u_[a] = mean;
      }
    }
  }
  const double full = kernels::omp::weighted_volume(grid_, u_, {});
  total_volume_ = base_ == Base::ProjectivePlane ? 0.5 * full : full;
}

ConformalMetric ConformalMetric::round(Base base, const SphereGrid& grid, double K) {
  return ConformalMetric(base, grid, Field(grid.size(), 0.0), K);
}

ConformalMetric ConformalMetric::perturbed(std::span<const double> w, double t) const {
  Field u = u_;
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] += t * w[k];
  }
  return ConformalMetric(base_, grid_, std::move(u), K_);
}

ConformalMetric ConformalMetric::shifted(double c) const {
  Field u = u_;
  for (double& v : u) {
    v += c;
  }
  return ConformalMetric(base_, grid_, std::move(u), K_);
}

ConformalMetric ConformalMetric::with_K(double K) const {
  return ConformalMetric(base_, grid_, u_, K);
}

}  // namespace lglab
