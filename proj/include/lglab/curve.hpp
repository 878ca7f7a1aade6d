#pragma once

#include <vector>

#include "lglab/vec3.hpp"

namespace lglab {

/// Closed polyline on the unit sphere with great-circle edges. The enclosed
/// region lies to the left when walking along the vertices with the outward
/// sphere normal pointing up.
struct Curve {
  std::vector<Vec3> vertices;

  std::size_t size() const { return vertices.size(); }
  const Vec3& operator[](std::size_t i) const { return vertices[i]; }
  const Vec3& next(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
  const Vec3& prev(std::size_t i) const {
    return vertices[(i + vertices.size() - 1) % vertices.size()];
  }
};

/// Maximum angle an edge may subtend.
inline constexpr double kMaxEdgeAngle = M_PI / 4.0;

/// Throws a resolution error if a vertex is off the sphere, two consecutive
/// vertices coincide, or an edge is longer than kMaxEdgeAngle.
void validate_curve(const Curve& c);

/// Geodesic circle of the given radius about center, region (the cap) on the left.
Curve geodesic_circle(const Vec3& center, double radius, int n_vertices);

/// Same vertices in the opposite order, so the other side is on the left.
Curve reversed(const Curve& c);

/// Image under x -> -x, reversed so the image of the left side stays on the left.
Curve antipodal_image(const Curve& c);

/// Unit inner normal (toward the left side) at each vertex, from the
/// tangent through the neighbouring vertices.
std::vector<Vec3> inner_normals(const Curve& c);

/// Round great-circle edge lengths; edge i joins vertex i to vertex i + 1.
std::vector<double> edge_lengths(const Curve& c);

/// Resamples to n vertices equally spaced in round arclength.
Curve resample_uniform(const Curve& c, int n_vertices);

/// True if any two non-adjacent edges cross.
bool self_intersects(const Curve& c);

}  // namespace lglab
