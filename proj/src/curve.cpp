#include "lglab/curve.hpp"

#include <cmath>
#include <string>

#include "lglab/error.hpp"

namespace lglab {

void validate_curve(const Curve& c) {
  if (c.size() < 3) {
    throw Error(ErrorKind::Resolution, "curve needs at least three vertices");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(norm(c[i]) - 1.0) > 1e-12) {
      throw Error(ErrorKind::Resolution, "vertex " + std::to_string(i) + " is off the unit sphere");
    }
    const double a = arc_distance(c[i], c.next(i));
    if (!(a > 0.0)) {
      throw Error(ErrorKind::Resolution, "repeated vertex at " + std::to_string(i));
    }
    if (a >= kMaxEdgeAngle) {
      throw Error(ErrorKind::Resolution, "edge " + std::to_string(i) + " subtends " +
                                             std::to_string(a) + " rad");
    }
  }
}

Curve geodesic_circle(const Vec3& center, double radius, int n_vertices) {
  const Vec3 c = normalized(center);
  const Vec3 e1 = any_orthogonal(c);
  const Vec3 e2 = cross(c, e1);
  const double cr = std::cos(radius);
  const double sr = std::sin(radius);
  Curve out;
  out.vertices.reserve(n_vertices);
  for (int k = 0; k < n_vertices; ++k) {
    const double s = 2.0 * M_PI * k / n_vertices;
    out.vertices.push_back(normalized(c * cr + (e1 * std::cos(s) + e2 * std::sin(s)) * sr));
  }
  return out;
}

Curve reversed(const Curve& c) {
  return Curve{{c.vertices.rbegin(), c.vertices.rend()}};
}

Curve antipodal_image(const Curve& c) {
  Curve out;
  out.vertices.reserve(c.size());
  for (auto it = c.vertices.rbegin(); it != c.vertices.rend(); ++it) {
    out.vertices.push_back(-*it);
  }
  return out;
}

std::vector<Vec3> inner_normals(const Curve& c) {
  std::vector<Vec3> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& p = c[i];
    const Vec3 t = normalized(tangential(p, c.next(i) - c.prev(i)));
    out[i] = cross(p, t);
  }
  return out;
}

std::vector<double> edge_lengths(const Curve& c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = arc_distance(c[i], c.next(i));
  }
  return out;
}

namespace {

Vec3 slerp(const Vec3& a, const Vec3& b, double frac) {
  const double omega = arc_distance(a, b);
  if (omega < 1e-15) {
    return a;
  }
  const double so = std::sin(omega);
  return normalized(a * (std::sin((1.0 - frac) * omega) / so) + b * (std::sin(frac * omega) / so));
}

}  // namespace

Curve resample_uniform(const Curve& c, int n_vertices) {
  const std::vector<double> len = edge_lengths(c);
  double total = 0.0;
  for (double l : len) {
    total += l;
  }
  Curve out;
  out.vertices.reserve(n_vertices);
  std::size_t edge = 0;
  double start = 0.0;
  for (int k = 0; k < n_vertices; ++k) {
    const double target = total * k / n_vertices;
    while (edge + 1 < c.size() && start + len[edge] < target) {
      start += len[edge];
      ++edge;
    }
    const double frac = len[edge] > 0.0 ? std::clamp((target - start) / len[edge], 0.0, 1.0) : 0.0;
    out.vertices.push_back(slerp(c[edge], c.next(edge), frac));
  }
  return out;
}

namespace {

bool arcs_cross(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // Sign tests against both great circles. Callers only pass short arcs that
  // are close to each other, which rules out the antipodal crossing.
  const Vec3 n1 = cross(a, b);
  const Vec3 n2 = cross(c, d);
  return dot(c, n1) * dot(d, n1) < 0.0 && dot(a, n2) * dot(b, n2) < 0.0;
}

}  // namespace

bool self_intersects(const Curve& c) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) {
        continue;
      }
      if (dot(c[i], c[j]) < 0.5 && dot(c[i], c.next(j)) < 0.5) {
        continue;
      }
      if (arcs_cross(c[i], c.next(i), c[j], c.next(j))) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace lglab
