#pragma once

#include "sfm/geometry.hpp"
#include "sfm/vec2.hpp"

namespace sfm {

/// Strengths (N), fall-off lengths (m) and perception anisotropy of the
/// psychological interaction terms.
struct SocialForceParams {
  double A_r = 2000.0;
  double B_r = 0.08;
  double A_att = 0.0;
  double B_att = 0.08;
  double lambda = 0.2;
  /// Time constant (s) of the exponential loss of interest in an attractor.
  double attraction_decay_time = 5.0;

  /// Throws std::invalid_argument naming the first parameter out of range.
  void validate() const;

  friend bool operator==(const SocialForceParams&, const SocialForceParams&) = default;
};

/// Anisotropic perception weight W(phi) = lambda + (1 - lambda)(1 + cos phi)/2.
double perception_weight(double phi, double lambda);

/// A_r exp((R - d)/B_r) W(phi) along +n.
Vec2 social_repulsion(const InteractionGeometry& geom, const SocialForceParams& params);

/// A_att exp((R - d)/B_att) W(phi) exp(-age/decay) along -n, i.e. toward the source.
Vec2 social_attraction(const InteractionGeometry& geom, const SocialForceParams& params,
                       double interest_age);

}  // namespace sfm
