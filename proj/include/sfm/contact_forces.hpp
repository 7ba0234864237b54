#pragma once

#include "sfm/geometry.hpp"
#include "sfm/vec2.hpp"

namespace sfm {

struct ContactParams {
  /// Body elasticity (N/m).
  double k = 1.2e5;
  /// Sliding friction coefficient (kg/(m s)).
  double kappa = 2.4e5;

  void validate() const;

  friend bool operator==(const ContactParams&, const ContactParams&) = default;
};

/// Contact gate: x for x >= 0, else 0.
constexpr double eta(double x) { return x >= 0.0 ? x : 0.0; }

/// Body compression counterforce k eta(R - d) n.
Vec2 pushing_force(const InteractionGeometry& geom, const ContactParams& params);

/// Pedestrian-pair sliding friction kappa eta(R - d) dv_t t, with
/// dv_t = (v_j - v_i) . t as produced by ped_pair_geometry.
Vec2 friction_force(const InteractionGeometry& geom, const ContactParams& params);

/// Wall sliding friction -kappa eta(r_i - d) (v_i . t) t; never accelerates
/// the pedestrian along the wall.
Vec2 wall_friction_force(const InteractionGeometry& geom, const ContactParams& params);

}  // namespace sfm
