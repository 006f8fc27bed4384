#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnav/geometry.hpp"

namespace gnav {

/// Uniform bucket grid over the xz plane answering exact 3D nearest-neighbor queries.
/// Results are ordered by (squared distance, id).
class SpatialGrid {
 public:
  SpatialGrid() = default;
  explicit SpatialGrid(std::span<const Position> points);

  std::size_t size() const { return points_.size(); }

  /// Up to k nearest ids, skipping `exclude` (pass -1 to keep every point).
  std::vector<std::uint32_t> nearest(const Position& q, std::size_t k, std::int64_t exclude = -1) const;

  /// Closest id with ties broken by the lowest id. Requires a non-empty grid.
  std::uint32_t nearest_one(const Position& q) const;

 private:
  std::vector<Position> points_;
  double min_x_ = 0.0;
  double min_z_ = 0.0;
  double cell_ = 1.0;
  int nx_ = 0;
  int nz_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

}  // namespace gnav
