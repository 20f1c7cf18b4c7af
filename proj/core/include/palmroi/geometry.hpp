#pragma once

#include <cmath>
#include <numbers>

namespace palmroi {

/// Integer pixel coordinate (column, row).
struct Pixel {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Pixel&, const Pixel&) = default;
  friend constexpr auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Sub-pixel point / vector in image coordinates (x right, y down).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}
  constexpr explicit Vec2(Pixel p) : x(p.x), y(p.y) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  friend constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }
/// Rotation by +90 degrees in the (x, y) plane: (x, y) -> (-y, x).
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 rotated(Vec2 v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Unsigned angle between two undirected lines, in [0, pi/2].
inline double line_angle(Vec2 d1, Vec2 d2) {
  const double a = std::atan2(std::abs(cross(d1, d2)), std::abs(dot(d1, d2)));
  return a;
}

/// Infinite line through `point` with unit `direction`.
struct Line {
  Vec2 point;
  Vec2 direction;

  /// Signed perpendicular distance; positive on the perp(direction) side.
  double signed_distance(Vec2 p) const { return cross(direction, p - point); }
  double distance(Vec2 p) const { return std::abs(signed_distance(p)); }
  Vec2 project(Vec2 p) const { return point + direction * dot(p - point, direction); }
};

/// Intersection of two non-parallel lines. Returns false when |sin| < eps.
inline bool intersect(const Line& a, const Line& b, Vec2& out, double eps = 1e-12) {
  const double denom = cross(a.direction, b.direction);
  if (std::abs(denom) < eps) return false;
  const double t = cross(b.point - a.point, b.direction) / denom;
  out = a.point + a.direction * t;
  return true;
}

}  // namespace palmroi
