#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfm/vec2.hpp"

namespace sfm {

/// Uniform spatial hash over a point set, rebuilt from scratch each step.
///
/// Queries return indices in ascending order so that force sums have the same
/// reduction order as a brute-force scan.
class NeighborGrid {
public:
  explicit NeighborGrid(double cell_size);

  /// `active[k] == 0` excludes point k from all queries.
  void rebuild(std::span<const Vec2> points, std::span<const std::uint8_t> active);

  /// Active indices (other than `self`) whose point lies within `radius` of `center`.
  void query(Vec2 center, double radius, std::size_t self, std::vector<std::size_t>& out) const;

  double cell_size() const { return cell_size_; }

private:
  double cell_size_;
  double effective_cell_ = 0.0;
  Vec2 origin_;
  long nx_ = 0;
  long ny_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> entries_;
  std::vector<Vec2> points_;
};

}  // namespace sfm
