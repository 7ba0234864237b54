#include "sfm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sfm/rng.hpp"

namespace sfm {

WallSegment::WallSegment(Vec2 a_, Vec2 b_, bool attractive_) : a(a_), b(b_), attractive(attractive_) {
  if (!is_finite(a) || !is_finite(b)) throw std::invalid_argument("wall endpoint is not finite");
  if (a == b) throw std::invalid_argument("wall segment has zero length");
}

double view_angle(Vec2 facing, Vec2 n) {
  const double c = std::clamp(dot(facing, -n), -1.0, 1.0);
  return std::acos(c);
}

std::optional<InteractionGeometry> ped_pair_geometry(const PedestrianState& i,
                                                     const PedestrianState& j) {
  const Vec2 diff = i.pos - j.pos;
  const double d = norm(diff);
  if (d == 0.0) return std::nullopt;
  InteractionGeometry g;
  g.R = i.radius + j.radius;
  g.d = d;
  g.n = diff / d;
  g.t = rotate90(g.n);
  g.phi = view_angle(facing_direction(i), g.n);
  g.dv_t = dot(j.vel - i.vel, g.t);
  return g;
}

Vec2 fallback_normal(PedestrianId a, PedestrianId b) {
  const PedestrianId lo = std::min(a, b);
  const PedestrianId hi = std::max(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
  const double u = uniform_from_bits(splitmix64(key));
  const Vec2 n = unit_from_angle(2.0 * std::numbers::pi * u);
  return a <= b ? n : -n;
}

InteractionGeometry ped_pair_geometry_or_fallback(const PedestrianState& i,
                                                  const PedestrianState& j) {
  if (auto g = ped_pair_geometry(i, j)) return *g;
  InteractionGeometry g;
  g.R = i.radius + j.radius;
  g.d = 0.0;
  g.n = fallback_normal(i.id, j.id);
  g.t = rotate90(g.n);
  g.phi = view_angle(facing_direction(i), g.n);
  g.dv_t = dot(j.vel - i.vel, g.t);
  return g;
}

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = norm_squared(ab);
  if (len2 == 0.0) return a;
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * s;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  return norm(p - closest_point_on_segment(p, a, b));
}

std::optional<InteractionGeometry> wall_geometry(const PedestrianState& i, const WallSegment& wall) {
  const Vec2 foot = closest_point_on_segment(i.pos, wall.a, wall.b);
  const Vec2 diff = i.pos - foot;
  const double d = norm(diff);
  if (d == 0.0) return std::nullopt;
  InteractionGeometry g;
  g.R = i.radius;
  g.d = d;
  g.n = diff / d;
  g.t = rotate90(g.n);
  g.phi = view_angle(facing_direction(i), g.n);
  g.dv_t = dot(i.vel, g.t);
  return g;
}

InteractionGeometry wall_geometry_or_fallback(const PedestrianState& i, const WallSegment& wall) {
  if (auto g = wall_geometry(i, wall)) return *g;
  InteractionGeometry g;
  g.R = i.radius;
  g.d = 0.0;
  g.n = rotate90((wall.b - wall.a) / wall.length());
  g.t = rotate90(g.n);
  g.phi = view_angle(facing_direction(i), g.n);
  g.dv_t = dot(i.vel, g.t);
  return g;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace sfm
