#include "lglab/geometry.hpp"

#include <cmath>

#include "lglab/error.hpp"
#include "lglab/interpolation.hpp"
#include "lglab/kernels.hpp"
#include "lglab/laplacian.hpp"

namespace lglab {

Field laplace_beltrami(const SphereGrid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) {
    throw Error(ErrorKind::Domain, "field size does not match the grid");
  }
  return laplacian_operator(grid).apply(f);
}

namespace {

CurvatureField summarize(Field values) {
  CurvatureField c;
  c.values = std::move(values);
  c.min_value = c.values[0];
  c.max_value = c.values[0];
  for (std::size_t k = 1; k < c.values.size(); ++k) {
    if (c.values[k] < c.min_value) {
      c.min_value = c.values[k];
      c.argmin = k;
    }
    if (c.values[k] > c.max_value) {
      c.max_value = c.values[k];
      c.argmax = k;
    }
  }
  return c;
}

}  // namespace

CurvatureField gauss_curvature(const SphereGrid& grid, std::span<const double> u) {
  const Field lap = laplace_beltrami(grid, u);
  Field k(grid.size());
  kernels::omp::gauss_curvature(u, lap, k);
  return summarize(std::move(k));
}

CurvatureField gauss_curvature(const ConformalMetric& m) { return gauss_curvature(m.grid(), m.u()); }

double integrate_volume(const ConformalMetric& m, std::optional<std::span<const double>> weight) {
  const std::span<const double> w = weight ? *weight : std::span<const double>{};
  if (!w.empty() && w.size() != m.grid().size()) {
    throw Error(ErrorKind::Domain, "weight size does not match the grid");
  }
  const double full = kernels::omp::weighted_volume(m.grid(), m.u(), w);
  return m.base() == Base::ProjectivePlane ? 0.5 * full : full;
}

double curve_length(const ConformalMetric& m, const Curve& c) {
  validate_curve(c);
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 mid = normalized(c[i] + c.next(i));
    total += arc_distance(c[i], c.next(i)) * std::exp(sample_at(m.grid(), m.u(), mid));
  }
  return total;
}

double curve_integral(const ConformalMetric& m, const Curve& c, std::span<const double> f) {
  validate_curve(c);
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 mid = normalized(c[i] + c.next(i));
    total += arc_distance(c[i], c.next(i)) * std::exp(sample_at(m.grid(), m.u(), mid)) *
             sample_at(m.grid(), f, mid);
  }
  return total;
}

CurveFrame curve_frame(const ConformalMetric& m, const Curve& c) {
  const std::size_t n = c.size();
  CurveFrame f;
  f.normals = inner_normals(c);
  f.dual_length.resize(n);
  f.k_round.resize(n);
  f.u.resize(n);
  f.du_dnu.resize(n);
  f.k.resize(n);
  f.ds.resize(n);
  const std::vector<double> len = edge_lengths(c);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = c.prev(i);
    const Vec3& b = c[i];
    const Vec3& d = c.next(i);
    f.dual_length[i] = 0.5 * (len[(i + n - 1) % n] + len[i]);

    const Vec3 t_in = normalized(cross(cross(a, b), b));
    const Vec3 t_out = normalized(tangential(b, d));
    const double s = dot(b, cross(t_in, t_out));
    const double co = dot(t_in, t_out);
    // Collinear triples turn by zero.
    const double turning = std::abs(s) < 1e-14 && co > 0.0 ? 0.0 : std::atan2(s, co);
    f.k_round[i] = turning / f.dual_length[i];

    Vec3 grad;
    f.u[i] = sample_at(m.grid(), m.u(), b, &grad);
    f.du_dnu[i] = dot(grad, f.normals[i]);
    const double scale = std::exp(-f.u[i]);
    f.k[i] = scale * (f.k_round[i] - f.du_dnu[i]);
    f.ds[i] = f.dual_length[i] / scale;
  }
  return f;
}

std::vector<double> geodesic_curvature(const ConformalMetric& m, const Curve& c) {
  validate_curve(c);
  return curve_frame(m, c).k;
}

std::size_t FlatLattice::size() const {
  std::size_t s = 1;
  for (int d = 0; d < dim; ++d) {
    s *= static_cast<std::size_t>(n);
  }
  return s;
}

std::vector<double> conformal_ricci_from_derivatives(int dim, std::span<const double> base_ricci,
                                                     std::span<const double> gradient,
                                                     std::span<const double> hessian) {
  if (dim < 2) {
    throw Error(ErrorKind::Domain, "conformal Ricci law needs dimension >= 2");
  }
  const double c = dim - 2;
  double lap = 0.0;
  double grad2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    lap += hessian[a * dim + a];
    grad2 += gradient[a] * gradient[a];
  }
  std::vector<double> out(static_cast<std::size_t>(dim) * dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const double delta = a == b ? 1.0 : 0.0;
      const double base = base_ricci.empty() ? 0.0 : base_ricci[a * dim + b];
      double v = base - lap * delta;
      if (c != 0.0) {
        v += -c * hessian[a * dim + b] + c * (gradient[a] * gradient[b] - grad2 * delta);
      }
      out[a * dim + b] = v;
    }
  }
  return out;
}

TensorField conformal_ricci_nd(const FlatLattice& lattice, std::span<const double> u,
                               const TensorField& base_ricci) {
  if (lattice.dim < 2) {
    throw Error(ErrorKind::Domain, "conformal Ricci law needs dimension >= 2");
  }
  const int dim = lattice.dim;
  const int n = lattice.n;
  const std::size_t size = lattice.size();
  if (u.size() != size) {
    throw Error(ErrorKind::Domain, "field size does not match the lattice");
  }
  std::vector<std::size_t> stride(dim);
  stride[0] = 1;
  for (int d = 1; d < dim; ++d) {
    stride[d] = stride[d - 1] * n;
  }
  const double h = lattice.spacing();

  TensorField out(size);
  std::vector<int> idx(dim);
  for (std::size_t k = 0; k < size; ++k) {
    std::size_t rest = k;
    for (int d = 0; d < dim; ++d) {
      idx[d] = static_cast<int>(rest % n);
      rest /= n;
    }
    auto shifted = [&](int d, int by) {
      const int moved = ((idx[d] + by) % n + n) % n;
      return static_cast<std::ptrdiff_t>(moved - idx[d]) * static_cast<std::ptrdiff_t>(stride[d]);
    };
    std::vector<double> grad(dim);
    std::vector<double> hess(static_cast<std::size_t>(dim) * dim);
    for (int a = 0; a < dim; ++a) {
      const double up = u[k + shifted(a, 1)];
      const double dn = u[k + shifted(a, -1)];
      grad[a] = (up - dn) / (2.0 * h);
      hess[a * dim + a] = (up - 2.0 * u[k] + dn) / (h * h);
      for (int b = a + 1; b < dim; ++b) {
        const double pp = u[k + shifted(a, 1) + shifted(b, 1)];
        const double pm = u[k + shifted(a, 1) + shifted(b, -1)];
        const double mp = u[k + shifted(a, -1) + shifted(b, 1)];
        const double mm = u[k + shifted(a, -1) + shifted(b, -1)];
        hess[a * dim + b] = hess[b * dim + a] = (pp - pm - mp + mm) / (4.0 * h * h);
      }
    }
    const std::span<const double> base =
        base_ricci.empty() ? std::span<const double>{} : std::span<const double>(base_ricci[k]);
    out[k] = conformal_ricci_from_derivatives(dim, base, grad, hess);
  }
  return out;
}

}  // namespace lglab
