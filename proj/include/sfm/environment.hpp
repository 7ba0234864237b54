#pragma once

#include <string>
#include <vector>

#include "sfm/geometry.hpp"

namespace sfm {

struct Exit {
  std::string id;
  WallSegment segment;

  friend bool operator==(const Exit&, const Exit&) = default;
};

/// Static geometry of a scenario.
struct Environment {
  std::vector<WallSegment> walls;
  std::vector<Exit> exits;
  std::vector<WallSegment> attractors;

  /// Index of the exit whose midpoint is closest to `p`, or -1 without exits.
  int nearest_exit(Vec2 p) const;
  /// True when the segment p -> q crosses no wall.
  bool line_of_sight(Vec2 p, Vec2 q) const;

  friend bool operator==(const Environment&, const Environment&) = default;
};

}  // namespace sfm
