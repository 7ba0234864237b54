#include "sfm/social_forces.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sfm {

void SocialForceParams::validate() const {
  auto fail = [](const char* name) {
    throw std::invalid_argument(std::string("social force parameter out of range: ") + name);
  };
  if (!(A_r >= 0.0) || !std::isfinite(A_r)) fail("A_r");
  if (!(B_r > 0.0) || !std::isfinite(B_r)) fail("B_r");
  if (!(A_att >= 0.0) || !std::isfinite(A_att)) fail("A_att");
  if (!(B_att > 0.0) || !std::isfinite(B_att)) fail("B_att");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda");
  if (!(attraction_decay_time > 0.0)) fail("attraction_decay_time");
}

double perception_weight(double phi, double lambda) {
  return lambda + (1.0 - lambda) * 0.5 * (1.0 + std::cos(phi));
}

Vec2 social_repulsion(const InteractionGeometry& geom, const SocialForceParams& params) {
  const double magnitude =
      params.A_r * std::exp((geom.R - geom.d) / params.B_r) * perception_weight(geom.phi, params.lambda);
  return geom.n * magnitude;
}

Vec2 social_attraction(const InteractionGeometry& geom, const SocialForceParams& params,
                       double interest_age) {
  if (params.A_att == 0.0) return {};
  const double interest = std::exp(-interest_age / params.attraction_decay_time);
  const double magnitude = params.A_att * std::exp((geom.R - geom.d) / params.B_att) *
                           perception_weight(geom.phi, params.lambda) * interest;
  return geom.n * -magnitude;
}

}  // namespace sfm
