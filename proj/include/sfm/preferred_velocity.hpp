#pragma once

#include <span>

#include "sfm/pedestrian.hpp"
#include "sfm/vec2.hpp"

namespace sfm {

/// Time constants and perception ranges of the tactical-level models.
struct PreferenceParams {
  /// Memory gain time (s) while an exit is in sight.
  double tau_gain = 0.5;
  /// Memory decay time (s) otherwise.
  double tau_decay = 10.0;
  /// Excitement relaxation time (s).
  double tau_E = 2.0;
  /// Radius (m) of the neighborhood used for herding averages and density.
  double neighborhood_radius = 2.0;
  /// Maximum distance (m) at which an exit counts as visible.
  double visibility_range = 25.0;
  /// Distance (m) at which a waypoint counts as reached.
  double waypoint_reach_radius = 0.5;
  /// Window (s) of the moving average of speed along the preferred direction.
  double avg_speed_window = 2.0;

  void validate() const;

  friend bool operator==(const PreferenceParams&, const PreferenceParams&) = default;
};

/// Averages over the neighbors within the neighborhood radius.
struct NeighborSummary {
  /// Mean of the neighbors' preferred directions (not normalized; may be zero).
  Vec2 avg_pref_direction;
  /// Mean neighbor velocity (m/s).
  Vec2 avg_velocity;
  /// Unit vector along avg_velocity, or exactly zero.
  Vec2 collective_direction;
  /// Non-dimensional crowd density in [0, 1].
  double density_tilde = 0.0;
  std::size_t count = 0;
};

/// Builds the summary for `self` from its neighbors. Every pointer in
/// `neighbors` must already lie within `radius` of `self` and exclude `self`.
NeighborSummary summarize_neighbors(const PedestrianState& self,
                                    std::span<const PedestrianState* const> neighbors, double radius);

/// Length of the polyline from the current position through all remaining waypoints.
double remaining_path_length(const PedestrianState& s);

/// Moves `waypoint_index` forward while the current waypoint is reached or its
/// half-plane has been crossed. The final waypoint is never skipped.
/// Returns true if the index changed.
bool advance_waypoint(PedestrianState& s, double reach_radius);

/// Unit vector toward the current waypoint; `last_direction` when standing on
/// the final one.
Vec2 preferred_direction_waypoint(const PedestrianState& s);

/// Deadline-driven speed (remaining path / time left), clamped to [0, v_max].
/// Without a deadline the pedestrian keeps v0_initial.
double preferred_speed_original(const PedestrianState& s, double t);

/// Panic parameter 1 - avg_speed / v0_initial, clamped to [0, 1].
double nervousness(const PedestrianState& s);

struct SpeedDirection {
  double speed = 0.0;
  Vec2 direction;
};

/// Nervousness-weighted speed and herding-blended direction using `s.p`.
SpeedDirection hmfv_preferred(const PedestrianState& s, const NeighborSummary& nbrs);

/// Memory/density blend of own motion, collective motion and the door direction.
Vec2 lkf_direction(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 door_dir);

/// lkf_direction with the individual term further blended toward the assessed
/// route by the familiarity factor f. Reduces exactly to lkf_direction at f = 0.
Vec2 familiarity_direction(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 door_dir);

/// dir (1 + E) v0 (1 - D) + <v_j> D.
Vec2 lkf_preferred_velocity(const PedestrianState& s, const NeighborSummary& nbrs, Vec2 dir);

/// One forward-Euler step of dM/dt = (dM - M)/tau, with dM = 1 and tau_gain
/// while the door is visible, else dM = 0 and tau_decay. Clamped to [0, 1].
double update_memory(double M, bool door_visible, double dt, double tau_gain, double tau_decay);

/// One forward-Euler step of dE/dt = (E_m clamp(1 - vbar/v0, 0, 1) - E)/tau_E,
/// clamped to [0, E_m].
double update_excitement(double E, double avg_speed, double v0_initial, double E_m, double dt,
                         double tau_E);

/// Exponential moving average of max(vel . dir, 0) over `window` seconds.
double update_avg_speed(double avg_speed, Vec2 vel, Vec2 dir, double dt, double window);

/// Relaxation drive (m / tau)(pref_vel - vel).
Vec2 preferred_force(const PedestrianState& s, Vec2 pref_vel);

struct PreferredMotion {
  Vec2 velocity;
  /// Unit preferred direction; becomes the next `last_direction`.
  Vec2 direction;
};

/// Dispatches to the strategy of `variant`. `door_dir` is only consulted by
/// the memory-based variants.
PreferredMotion evaluate_preferred(Variant variant, const PedestrianState& s,
                                   const NeighborSummary& nbrs, Vec2 door_dir, double t);

}  // namespace sfm
