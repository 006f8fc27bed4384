#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gnav/worldgen.hpp"

namespace gnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Slab test. Returns the entry distance, 0 when the origin is inside, or +inf on a miss.
double ray_box(const Position& o, const Vec3& d, const Box& b, double max_dist) {
  double t0 = 0.0;
  double t1 = max_dist;
  const auto slab = [&](double origin, double dir, double lo, double hi) {
    if (std::abs(dir) < 1e-12) return origin >= lo && origin <= hi;
    double ta = (lo - origin) / dir;
    double tb = (hi - origin) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
  };
  if (!slab(o.x, d.x, b.min_x, b.max_x)) return kInf;
  if (!slab(o.y, d.y, b.bottom, b.top)) return kInf;
  if (!slab(o.z, d.z, b.min_z, b.max_z)) return kInf;
  return t0;
}

/// Clips the parametric range [t0, t1] of the ray to the map rectangle in xz.
bool clip_to_extent(const TerrainMap& map, const Position& o, const Vec3& d, double& t0, double& t1) {
  const auto clip = [&](double origin, double dir, double hi) {
    if (std::abs(dir) < 1e-12) return origin >= 0.0 && origin <= hi;
    double ta = (0.0 - origin) / dir;
    double tb = (hi - origin) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
  };
  return clip(o.x, d.x, map.config().extent_x) && clip(o.z, d.z, map.config().extent_z);
}

class TerrainRay {
 public:
  TerrainRay(const TerrainMap& map, const Position& o, const Vec3& d) : map_(map), o_(o), d_(d) {}

  double height_gap(double t) const {
    return o_.y + d_.y * t - map_.terrain_height(o_.x + d_.x * t, o_.z + d_.z * t);
  }

  /// Root of height_gap in [a, b] given gap(a) > 0 >= gap(b). Illinois variant of regula falsi.
  double refine(double a, double fa, double b, double fb) const {
    int side = 0;
    for (int it = 0; it < 40; ++it) {
      const double c = (a * fb - b * fa) / (fb - fa);
      const double fc = height_gap(c);
      if (std::abs(fc) < 1e-10 || b - a < 1e-9) return c;
      if (fc > 0.0) {
        a = c;
        fa = fc;
        if (side == -1) fb *= 0.5;
        side = -1;
      } else {
        b = c;
        fb = fc;
        if (side == 1) fa *= 0.5;
        side = 1;
      }
    }
    return b;
  }

  /// First crossing in [t0, t1], or +inf.
  double first_hit(double t0, double t1) const {
    double f0 = height_gap(t0);
    if (f0 <= 0.0) return t0;
    if (d_.y >= 0.0 && o_.y + d_.y * t0 > map_.max_terrain()) return kInf;

    const double cs = map_.config().cell_size;
    const double block = cs * map_.block_cells();
    const double horiz = std::hypot(d_.x, d_.z);
    const double step = 0.5 * cs / std::max(horiz, 1e-3);

    // 2D DDA over coarse blocks; only blocks the ray can dip into are marched.
    const double sx = o_.x + d_.x * t0;
    const double sz = o_.z + d_.z * t0;
    int bx = std::clamp(static_cast<int>(std::floor(sx / block)), 0, map_.blocks_x() - 1);
    int bz = std::clamp(static_cast<int>(std::floor(sz / block)), 0, map_.blocks_z() - 1);
    const int step_x = d_.x > 0.0 ? 1 : -1;
    const int step_z = d_.z > 0.0 ? 1 : -1;
    const auto boundary_t = [&](double origin, double dir, int cell, int stp) {
      if (std::abs(dir) < 1e-12) return kInf;
      const double edge = (stp > 0 ? cell + 1 : cell) * block;
      return (edge - origin) / dir;
    };
    double next_x = boundary_t(o_.x, d_.x, bx, step_x);
    double next_z = boundary_t(o_.z, d_.z, bz, step_z);
    const double delta_x = std::abs(d_.x) < 1e-12 ? kInf : block / std::abs(d_.x);
    const double delta_z = std::abs(d_.z) < 1e-12 ? kInf : block / std::abs(d_.z);

    double ta = t0;
    while (ta < t1) {
      const double tb = std::min({next_x, next_z, t1});
      const double ymin = o_.y + d_.y * (d_.y < 0.0 ? tb : ta);
      if (ymin <= map_.block_max(bx, bz)) {
        double t = ta;
        double ft = height_gap(t);
        if (ft <= 0.0) return t;
        while (t < tb) {
          const double tn = std::min(t + step, tb);
          const double fn = height_gap(tn);
          if (fn <= 0.0) return refine(t, ft, tn, fn);
          t = tn;
          ft = fn;
        }
      }
      if (tb >= t1) break;
      ta = tb;
      if (next_x < next_z) {
        bx += step_x;
        next_x += delta_x;
        if (bx < 0 || bx >= map_.blocks_x()) break;
      } else {
        bz += step_z;
        next_z += delta_z;
        if (bz < 0 || bz >= map_.blocks_z()) break;
      }
    }
    return kInf;
  }

 private:
  const TerrainMap& map_;
  Position o_;
  Vec3 d_;
};

}  // namespace

double raycast(const TerrainMap& map, const Position& origin, const Vec3& direction, double max_dist,
               std::span<const std::uint32_t> candidate_boxes) {
  double best = max_dist;
  const auto boxes = map.boxes();
  for (std::uint32_t i : candidate_boxes) best = std::min(best, ray_box(origin, direction, boxes[i], best));

  double t0 = 0.0;
  double t1 = best;
  if (clip_to_extent(map, origin, direction, t0, t1)) {
    best = std::min(best, TerrainRay(map, origin, direction).first_hit(t0, t1));
  }
  return best;
}

double raycast(const TerrainMap& map, const Position& origin, const Vec3& direction, double max_dist) {
  std::vector<std::uint32_t> all(map.boxes().size());
  std::iota(all.begin(), all.end(), 0u);
  return raycast(map, origin, direction, max_dist, all);
}

}  // namespace gnav
