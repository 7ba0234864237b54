#include "sfm/neighbor_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfm {

NeighborGrid::NeighborGrid(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
}

void NeighborGrid::rebuild(std::span<const Vec2> points, std::span<const std::uint8_t> active) {
  points_.assign(points.begin(), points.end());
  entries_.clear();
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  std::size_t n_active = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!active[k]) continue;
    ++n_active;
    lo_x = std::min(lo_x, points[k].x);
    lo_y = std::min(lo_y, points[k].y);
    hi_x = std::max(hi_x, points[k].x);
    hi_y = std::max(hi_y, points[k].y);
  }
  if (n_active == 0) {
    nx_ = ny_ = 0;
    cell_start_.assign(1, 0);
    return;
  }
  // Widen cells if a sparse, far-flung population would need a huge grid.
  effective_cell_ = cell_size_;
  const double max_cells = 16.0 * static_cast<double>(n_active) + 1024.0;
  while (((hi_x - lo_x) / effective_cell_ + 1.0) * ((hi_y - lo_y) / effective_cell_ + 1.0) > max_cells)
    effective_cell_ *= 2.0;
  origin_ = {lo_x, lo_y};
  nx_ = static_cast<long>((hi_x - lo_x) / effective_cell_) + 1;
  ny_ = static_cast<long>((hi_y - lo_y) / effective_cell_) + 1;

  const auto cell_of = [&](Vec2 p) {
    const long cx = std::clamp(static_cast<long>((p.x - origin_.x) / effective_cell_), 0L, nx_ - 1);
    const long cy = std::clamp(static_cast<long>((p.y - origin_.y) / effective_cell_), 0L, ny_ - 1);
    return static_cast<std::size_t>(cy * nx_ + cx);
  };
  cell_start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  for (std::size_t k = 0; k < points.size(); ++k)
    if (active[k]) ++cell_start_[cell_of(points[k]) + 1];
  for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
  entries_.resize(n_active);
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t k = 0; k < points.size(); ++k)
    if (active[k]) entries_[fill[cell_of(points[k])]++] = k;
}

void NeighborGrid::query(Vec2 center, double radius, std::size_t self, std::vector<std::size_t>& out) const {
  out.clear();
  if (nx_ == 0) return;
  const double r2 = radius * radius;
  const long cx0 = std::max(0L, static_cast<long>(std::floor((center.x - radius - origin_.x) / effective_cell_)));
  const long cy0 = std::max(0L, static_cast<long>(std::floor((center.y - radius - origin_.y) / effective_cell_)));
  const long cx1 = std::min(nx_ - 1, static_cast<long>(std::floor((center.x + radius - origin_.x) / effective_cell_)));
  const long cy1 = std::min(ny_ - 1, static_cast<long>(std::floor((center.y + radius - origin_.y) / effective_cell_)));
  for (long cy = cy0; cy <= cy1; ++cy) {
    for (long cx = cx0; cx <= cx1; ++cx) {
      const auto c = static_cast<std::size_t>(cy * nx_ + cx);
      for (std::size_t e = cell_start_[c]; e < cell_start_[c + 1]; ++e) {
        const std::size_t k = entries_[e];
        if (k != self && norm_squared(points_[k] - center) <= r2) out.push_back(k);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace sfm
