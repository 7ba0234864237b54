#include "sfm/contact_forces.hpp"

#include <cmath>
#include <stdexcept>

namespace sfm {

void ContactParams::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("contact parameter out of range: k");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("contact parameter out of range: kappa");
}

Vec2 pushing_force(const InteractionGeometry& geom, const ContactParams& params) {
  const double overlap = eta(geom.R - geom.d);
  if (overlap == 0.0) return {};
  return geom.n * (params.k * overlap);
}

Vec2 friction_force(const InteractionGeometry& geom, const ContactParams& params) {
  const double overlap = eta(geom.R - geom.d);
  if (overlap == 0.0) return {};
  return geom.t * (params.kappa * overlap * geom.dv_t);
}

Vec2 wall_friction_force(const InteractionGeometry& geom, const ContactParams& params) {
  const double overlap = eta(geom.R - geom.d);
  if (overlap == 0.0) return {};
  return geom.t * (-params.kappa * overlap * geom.dv_t);
}

}  // namespace sfm
