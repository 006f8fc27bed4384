#include "gnav/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

namespace gnav {

SpatialGrid::SpatialGrid(std::span<const Position> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) return;
  double max_x = points_[0].x;
  double max_z = points_[0].z;
  min_x_ = points_[0].x;
  min_z_ = points_[0].z;
  for (const Position& p : points_) {
    min_x_ = std::min(min_x_, p.x);
    min_z_ = std::min(min_z_, p.z);
    max_x = std::max(max_x, p.x);
    max_z = std::max(max_z, p.z);
  }
  const double w = std::max(max_x - min_x_, 1e-9);
  const double d = std::max(max_z - min_z_, 1e-9);
  // About two points per bucket, at most 2048 buckets per axis.
  cell_ = std::max({std::sqrt(2.0 * w * d / static_cast<double>(points_.size())), w / 2047.0, d / 2047.0, 1e-9});
  nx_ = static_cast<int>(w / cell_) + 1;
  nz_ = static_cast<int>(d / cell_) + 1;

  std::vector<std::uint32_t> bucket(points_.size());
  offsets_.assign(static_cast<std::size_t>(nx_) * nz_ + 1, 0);
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    const int bx = std::clamp(static_cast<int>((points_[i].x - min_x_) / cell_), 0, nx_ - 1);
    const int bz = std::clamp(static_cast<int>((points_[i].z - min_z_) / cell_), 0, nz_ - 1);
    bucket[i] = static_cast<std::uint32_t>(bz) * nx_ + bx;
    ++offsets_[bucket[i] + 1];
  }
  for (std::size_t b = 1; b < offsets_.size(); ++b) offsets_[b] += offsets_[b - 1];
  items_.resize(points_.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < points_.size(); ++i) items_[fill[bucket[i]]++] = i;
}

std::vector<std::uint32_t> SpatialGrid::nearest(const Position& q, std::size_t k, std::int64_t exclude) const {
  std::vector<std::uint32_t> out;
  if (points_.empty() || k == 0) return out;

  using Entry = std::pair<double, std::uint32_t>;  // (squared distance, id); max-heap keeps the worst on top
  std::priority_queue<Entry> heap;
  const double fx = (q.x - min_x_) / cell_;
  const double fz = (q.z - min_z_) / cell_;
  const int cx = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
  const int cz = std::clamp(static_cast<int>(std::floor(fz)), 0, nz_ - 1);
  const bool inside = fx >= 0.0 && fz >= 0.0 && fx < nx_ && fz < nz_;

  const auto visit = [&](int bx, int bz) {
    if (bx < 0 || bz < 0 || bx >= nx_ || bz >= nz_) return;
    const std::size_t b = static_cast<std::size_t>(bz) * nx_ + bx;
    for (std::uint32_t j = offsets_[b]; j < offsets_[b + 1]; ++j) {
      const std::uint32_t id = items_[j];
      if (static_cast<std::int64_t>(id) == exclude) continue;
      const Entry e{squared_distance(q, points_[id]), id};
      if (heap.size() < k) {
        heap.push(e);
      } else if (e < heap.top()) {
        heap.pop();
        heap.push(e);
      }
    }
  };

  const int max_ring = std::max({cx, cz, nx_ - 1 - cx, nz_ - 1 - cz});
  for (int r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      visit(cx, cz);
    } else {
      for (int x = cx - r; x <= cx + r; ++x) {
        visit(x, cz - r);
        visit(x, cz + r);
      }
      for (int z = cz - r + 1; z <= cz + r - 1; ++z) {
        visit(cx - r, z);
        visit(cx + r, z);
      }
    }
    if (heap.size() == k && inside) {
      // Everything outside the searched square is at least this far away horizontally.
      const double gap = std::min({fx - (cx - r), (cx + r + 1) - fx, fz - (cz - r), (cz + r + 1) - fz}) * cell_;
      if (heap.top().first < gap * gap) break;
    }
  }

  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

std::uint32_t SpatialGrid::nearest_one(const Position& q) const { return nearest(q, 1).front(); }

}  // namespace gnav
