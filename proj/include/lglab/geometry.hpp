#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lglab/conformal_metric.hpp"
#include "lglab/curve.hpp"

namespace lglab {

/// Round-sphere Laplace-Beltrami of a grid field. Throws a resolution error
/// for grids with n_theta < 8.
Field laplace_beltrami(const SphereGrid& grid, std::span<const double> f);

struct CurvatureField {
  Field values;
  double min_value = 0.0;
  std::size_t argmin = 0;
  double max_value = 0.0;
  std::size_t argmax = 0;
};

/// Gauss curvature of exp(2u) g_round: exp(-2u) (1 - lap u).
/// Ties in argmin/argmax go to the lowest node index.
CurvatureField gauss_curvature(const ConformalMetric& m);
CurvatureField gauss_curvature(const SphereGrid& grid, std::span<const double> u);

/// Integral of weight * dvol over the surface; halved for the projective plane.
double integrate_volume(const ConformalMetric& m,
                        std::optional<std::span<const double>> weight = std::nullopt);

double curve_length(const ConformalMetric& m, const Curve& c);

/// Boundary integral of f along c in the metric of m (edge midpoint rule,
/// same discretization as curve_length).
double curve_integral(const ConformalMetric& m, const Curve& c, std::span<const double> f);

/// Per-vertex geodesic curvature with respect to the inner normal, using
/// k = exp(-u) (k0 - du/dnu), where k0 is the discrete round curvature
/// (turning angle over dual arclength).
std::vector<double> geodesic_curvature(const ConformalMetric& m, const Curve& c);

/// Per-vertex data shared by curvature, flow and variation code.
struct CurveFrame {
  std::vector<Vec3> normals;       ///< inner unit normals (round)
  std::vector<double> dual_length; ///< half the sum of adjacent round edges
  std::vector<double> k_round;     ///< discrete round geodesic curvature
  std::vector<double> u;           ///< interpolated conformal exponent
  std::vector<double> du_dnu;      ///< derivative of u along the inner normal
  std::vector<double> k;           ///< geodesic curvature in the conformal metric
  std::vector<double> ds;          ///< conformal dual length exp(u) * dual_length
};

CurveFrame curve_frame(const ConformalMetric& m, const Curve& c);

/// Ricci tensor of exp(2u) g on a flat periodic cube lattice of the given
/// dimension, from the conformal transformation law
///   Ric_hat = Ric - (lap u) g - (n-2) Hess u + (n-2) (du (x) du - |du|^2 g).
/// The base metric is the identity.
struct FlatLattice {
  int dim;
  int n;          ///< nodes per axis
  double length;  ///< period per axis

  std::size_t size() const;
  double spacing() const { return length / n; }
};

/// Symmetric dim x dim tensor per node, row-major.
using TensorField = std::vector<std::vector<double>>;

TensorField conformal_ricci_nd(const FlatLattice& lattice, std::span<const double> u,
                               const TensorField& base_ricci);

/// Pointwise form of the same law from precomputed derivatives at one node.
std::vector<double> conformal_ricci_from_derivatives(int dim, std::span<const double> base_ricci,
                                                     std::span<const double> gradient,
                                                     std::span<const double> hessian);

}  // namespace lglab
