#pragma once

#include <cmath>
#include <ostream>

namespace sfm {

/// Planar vector used for positions (m), velocities (m/s) and forces (N).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm_squared(Vec2 a) { return dot(a, a); }

/// Counter-clockwise quarter turn: (x, y) -> (-y, x).
constexpr Vec2 rotate90(Vec2 a) { return {-a.y, a.x}; }

inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Unit vector along `a`, or `fallback` when |a| <= min_norm.
inline Vec2 normalized_or(Vec2 a, Vec2 fallback, double min_norm = 0.0) {
  const double n = norm(a);
  if (!(n > min_norm)) return fallback;
  return a / n;
}

inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline std::ostream& operator<<(std::ostream& os, Vec2 v) {
  return os << '(' << v.x << ", " << v.y << ')';
}

}  // namespace sfm
