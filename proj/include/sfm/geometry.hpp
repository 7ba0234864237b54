#pragma once

#include <optional>

#include "sfm/pedestrian.hpp"
#include "sfm/vec2.hpp"

namespace sfm {

/// Straight wall or object boundary. Attractive segments model shops,
/// displays and similar sources of interest; all others repel.
struct WallSegment {
  Vec2 a;
  Vec2 b;
  bool attractive = false;

  WallSegment() = default;
  /// Throws std::invalid_argument when a == b or an endpoint is not finite.
  WallSegment(Vec2 a, Vec2 b, bool attractive = false);

  double length() const { return norm(b - a); }
  Vec2 midpoint() const { return (a + b) * 0.5; }

  friend bool operator==(const WallSegment&, const WallSegment&) = default;
};

/// Pairwise quantities shared by every force formula.
///
/// `n` points toward pedestrian i, `t = rotate90(n)`. For pedestrian pairs
/// `dv_t = (v_j - v_i) . t`; for walls `dv_t = v_i . t`.
struct InteractionGeometry {
  double R = 0.0;
  double d = 0.0;
  Vec2 n{1.0, 0.0};
  Vec2 t{0.0, 1.0};
  double phi = 0.0;
  double dv_t = 0.0;
};

/// Angle in [0, pi] between `facing` and the direction -n (from i toward the source).
double view_angle(Vec2 facing, Vec2 n);

/// Geometry of pedestrian i relative to pedestrian j. Returns std::nullopt when
/// the centers coincide (degenerate geometry).
std::optional<InteractionGeometry> ped_pair_geometry(const PedestrianState& i,
                                                     const PedestrianState& j);

/// Geometry of pedestrian i relative to the nearest point of `wall`. Returns
/// std::nullopt when the center lies exactly on the segment.
std::optional<InteractionGeometry> wall_geometry(const PedestrianState& i, const WallSegment& wall);

/// Deterministic unit normal for a coincident pair, oriented for the
/// lower id. The partner sees the negated vector.
Vec2 fallback_normal(PedestrianId a, PedestrianId b);

/// ped_pair_geometry with the coincident case resolved by fallback_normal.
InteractionGeometry ped_pair_geometry_or_fallback(const PedestrianState& i,
                                                  const PedestrianState& j);

/// wall_geometry with the on-segment case resolved by the segment's left normal.
InteractionGeometry wall_geometry_or_fallback(const PedestrianState& i, const WallSegment& wall);

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Closed-segment intersection test (touching endpoints count).
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

}  // namespace sfm
