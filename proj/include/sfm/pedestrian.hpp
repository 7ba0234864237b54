#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sfm/vec2.hpp"

namespace sfm {

using PedestrianId = std::uint32_t;

/// Preferred-velocity strategy driving every pedestrian in a run.
enum class Variant { Original, Hmfv, Lkf, Familiarity };

std::string_view to_string(Variant v);
/// Throws std::invalid_argument for unknown names.
Variant parse_variant(std::string_view name);

/// Kinematic and psychological state of one pedestrian.
///
/// The psychological fields (p, M, E, D, f) are dimensionless; p, M, D and f
/// live in [0, 1] and E in [0, E_m]. `last_direction` holds the most recent
/// preferred direction e_i^0 and doubles as the facing direction whenever the
/// pedestrian is (nearly) at rest.
struct PedestrianState {
  PedestrianId id = 0;
  Vec2 pos;
  Vec2 vel;
  double radius = 0.3;
  double mass = 80.0;
  double tau = 0.5;
  double v0_initial = 1.5;
  double v_max = 3.0;
  std::optional<double> deadline;

  std::vector<Vec2> waypoints;
  std::size_t waypoint_index = 0;
  /// Start of the leg that ends at waypoints[waypoint_index].
  Vec2 leg_origin;

  double p = 0.0;
  double M = 0.0;
  double E = 0.0;
  double E_m = 1.0;
  double D = 0.0;
  double f = 0.0;
  std::optional<Vec2> route_target;

  /// Running estimate of the speed along the preferred direction.
  double avg_speed = 0.0;
  Vec2 last_direction{1.0, 0.0};

  bool evacuated = false;
};

/// Speeds below this are treated as "at rest" when a facing direction is needed.
inline constexpr double kRestSpeed = 1e-6;

/// Unit motion direction, or `last_direction` when at rest.
inline Vec2 facing_direction(const PedestrianState& s) {
  const double speed = norm(s.vel);
  if (speed < kRestSpeed) return s.last_direction;
  return s.vel / speed;
}

}  // namespace sfm
