#include "sfm/preferred_velocity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sfm {

namespace {

// Below this a blended direction counts as a zero resultant.
constexpr double kZeroBlend = 1e-12;

Vec2 individual_term(const PedestrianState& s, const NeighborSummary& nbrs) {
  const double rho = nbrs.density_tilde;
  return facing_direction(s) * (1.0 - rho) + nbrs.collective_direction * rho;
}

Vec2 memory_blend(const PedestrianState& s, Vec2 individual, Vec2 door_dir) {
  if (s.M == 1.0) return door_dir;
  const Vec2 blended = individual * (1.0 - s.M) + door_dir * s.M;
  return normalized_or(blended, s.last_direction, kZeroBlend);
}

}  // namespace

void PreferenceParams::validate() const {
  auto fail = [](const char* name) {
    throw std::invalid_argument(std::string("preference parameter out of range: ") + name);
  };
  if (!(tau_gain > 0.0)) fail("tau_gain");
  if (!(tau_decay > 0.0)) fail("tau_decay");
  if (!(tau_E > 0.0)) fail("tau_E");
  if (!(neighborhood_radius > 0.0)) fail("neighborhood_radius");
  if (!(visibility_range >= 0.0)) fail("visibility_range");
  if (!(waypoint_reach_radius >= 0.0)) fail("waypoint_reach_radius");
  if (!(avg_speed_window > 0.0)) fail("avg_speed_window");
}

NeighborSummary summarize_neighbors(const PedestrianState& self,
                                    std::span<const PedestrianState* const> neighbors, double radius) {
  NeighborSummary out;
  out.count = neighbors.size();
  if (neighbors.empty()) return out;
  Vec2 dir_sum;
  Vec2 vel_sum;
  for (const PedestrianState* n : neighbors) {
    dir_sum += n->last_direction;
    vel_sum += n->vel;
  }
  const double inv = 1.0 / static_cast<double>(neighbors.size());
  out.avg_pref_direction = dir_sum * inv;
  out.avg_velocity = vel_sum * inv;
  out.collective_direction = normalized_or(out.avg_velocity, Vec2{}, kRestSpeed);
  const double ratio = self.radius / radius;
  out.density_tilde = std::clamp(static_cast<double>(out.count) * ratio * ratio, 0.0, 1.0);
  return out;
}

double remaining_path_length(const PedestrianState& s) {
  if (s.waypoints.empty()) return 0.0;
  double len = norm(s.waypoints[s.waypoint_index] - s.pos);
  for (std::size_t k = s.waypoint_index + 1; k < s.waypoints.size(); ++k)
    len += norm(s.waypoints[k] - s.waypoints[k - 1]);
  return len;
}

bool advance_waypoint(PedestrianState& s, double reach_radius) {
  bool moved = false;
  while (s.waypoint_index + 1 < s.waypoints.size()) {
    const Vec2 wp = s.waypoints[s.waypoint_index];
    const Vec2 leg = wp - s.leg_origin;
    const bool reached = norm(s.pos - wp) <= reach_radius;
    const bool passed = norm_squared(leg) > 0.0 && dot(s.pos - wp, leg) > 0.0;
    if (!reached && !passed) break;
    s.leg_origin = wp;
    ++s.waypoint_index;
    moved = true;
  }
  return moved;
}

Vec2 preferred_direction_waypoint(const PedestrianState& s) {
  if (s.waypoints.empty()) return s.last_direction;
  for (std::size_t k = s.waypoint_index; k < s.waypoints.size(); ++k) {
    const Vec2 diff = s.waypoints[k] - s.pos;
    const double d = norm(diff);
    if (d > 0.0) return diff / d;
  }
  return s.last_direction;
}

double preferred_speed_original(const PedestrianState& s, double t) {
  if (!s.deadline) return s.v0_initial;
  const double time_left = std::max(*s.deadline - t, s.tau);
  return std::clamp(remaining_path_length(s) / time_left, 0.0, s.v_max);
}

double nervousness(const PedestrianState& s) {
  return std::clamp(1.0 - s.avg_speed / s.v0_initial, 0.0, 1.0);
}

SpeedDirection hmfv_preferred(const PedestrianState& s, const NeighborSummary& nbrs) {
  const Vec2 own = preferred_direction_waypoint(s);
  if (s.p == 0.0) return {s.v0_initial, own};
  const double speed = (1.0 - s.p) * s.v0_initial + s.p * s.v_max;
  const Vec2 blend = own * (1.0 - s.p) + nbrs.avg_pref_direction * s.p;
  return {speed, normalized_or(blend, s.last_direction, kZeroBlend)};
}

Vec2 lkf_direction(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 door_dir) {
  return memory_blend(s, individual_term(s, nbrs), door_dir);
}

Vec2 familiarity_direction(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 door_dir) {
  Vec2 inner = individual_term(s, nbrs);
  if (s.f != 0.0) {
    const Vec2 route = s.route_target ? normalized_or(*s.route_target - s.pos, s.last_direction)
                                      : preferred_direction_waypoint(s);
    inner = inner * (1.0 - s.f) + route * s.f;
  }
  return memory_blend(s, inner, door_dir);
}

Vec2 lkf_preferred_velocity(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 dir) {
  if (s.D == 1.0) return nbrs.avg_velocity;
  const Vec2 own = dir * ((1.0 + s.E) * s.v0_initial * (1.0 - s.D));
  if (s.D == 0.0) return own;
  return own + nbrs.avg_velocity * s.D;
}

double update_memory(double M, bool door_visible, double dt, double tau_gain, double tau_decay) {
  const double target = door_visible ? 1.0 : 0.0;
  const double tau = door_visible ? tau_gain : tau_decay;
  return std::clamp(M + dt * (target - M) / tau, 0.0, 1.0);
}

double update_excitement(double E, double avg_speed, double v0_initial, double E_m, double dt,
                         double tau_E) {
  const double effective_max = E_m * std::clamp(1.0 - avg_speed / v0_initial, 0.0, 1.0);
  return std::clamp(E + dt * (effective_max - E) / tau_E, 0.0, E_m);
}

double update_avg_speed(double avg_speed, Vec2 vel, Vec2 dir, double dt, double window) {
  const double along = std::max(dot(vel, dir), 0.0);
  const double w = std::min(dt / window, 1.0);
  return avg_speed + w * (along - avg_speed);
}

Vec2 preferred_force(const PedestrianState& s, Vec2 pref_vel) {
  return (pref_vel - s.vel) * (s.mass / s.tau);
}

PreferredMotion evaluate_preferred(Variant variant, const PedestrianState& s,
                                   const NeighborSummary& nbrs, Vec2 door_dir, double t) {
  switch (variant) {
    case Variant::Original: {
      const Vec2 dir = preferred_direction_waypoint(s);
      return {dir * preferred_speed_original(s, t), dir};
    }
    case Variant::Hmfv: {
      const SpeedDirection sd = hmfv_preferred(s, nbrs);
      return {sd.direction * sd.speed, sd.direction};
    }
    case Variant::Lkf: {
      const Vec2 dir = lkf_direction(s, nbrs, door_dir);
      return {lkf_preferred_velocity(s, nbrs, dir), dir};
    }
    case Variant::Familiarity: {
      const Vec2 dir = familiarity_direction(s, nbrs, door_dir);
      return {lkf_preferred_velocity(s, nbrs, dir), dir};
    }
  }
  throw std::logic_error("unhandled variant");
}

}  // namespace sfm
