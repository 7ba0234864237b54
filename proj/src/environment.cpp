#include "sfm/environment.hpp"

namespace sfm {

int Environment::nearest_exit(Vec2 p) const {
  int best = -1;
  double best_d2 = 0.0;
  for (std::size_t k = 0; k < exits.size(); ++k) {
    const double d2 = norm_squared(exits[k].segment.midpoint() - p);
    if (best < 0 || d2 < best_d2) {
      best = static_cast<int>(k);
      best_d2 = d2;
    }
  }
  return best;
}

bool Environment::line_of_sight(Vec2 p, Vec2 q) const {
  for (const WallSegment& w : walls)
    if (segments_intersect(p, q, w.a, w.b)) return false;
  return true;
}

}  // namespace sfm
