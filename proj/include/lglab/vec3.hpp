#pragma once

#include <algorithm>
#include <cmath>

namespace lglab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

/// Great-circle distance between two unit vectors. Uses atan2 so it stays
/// accurate for both nearly equal and nearly antipodal inputs.
inline double arc_distance(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

/// Component of v orthogonal to the unit vector p.
inline Vec3 tangential(const Vec3& p, const Vec3& v) { return v - p * dot(p, v); }

/// Exponential map of the unit sphere at p applied to the tangent vector v.
inline Vec3 sphere_exp(const Vec3& p, const Vec3& v) {
  const double len = norm(v);
  if (len == 0.0) {
    return p;
  }
  return normalized(p * std::cos(len) + v * (std::sin(len) / len));
}

inline Vec3 from_spherical(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

/// Colatitude in [0, pi] and longitude in [0, 2 pi) of a unit vector.
inline void to_spherical(const Vec3& p, double& theta, double& phi) {
  theta = std::atan2(std::hypot(p.x, p.y), p.z);
  phi = std::atan2(p.y, p.x);
  if (phi < 0.0) {
    phi += 2.0 * M_PI;
  }
  if (phi >= 2.0 * M_PI) {
    phi = 0.0;
  }
}

/// Any unit vector orthogonal to the unit vector n.
inline Vec3 any_orthogonal(const Vec3& n) {
  const Vec3 trial = std::abs(n.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  return normalized(cross(trial, n));
}

}  // namespace lglab
