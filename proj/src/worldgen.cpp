#include "gnav/worldgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "gnav/errors.hpp"

namespace gnav {
namespace {

bool is_integral_ratio(double extent, double cell) {
  const double r = extent / cell;
  return std::abs(r - std::round(r)) < 1e-9 * std::max(1.0, r);
}

struct FeatureRanges {
  double min_size;
  double max_size;
  double min_height;
  double max_height;
};

constexpr FeatureRanges kBuildingRanges{6.0, 14.0, 12.0, 30.0};
constexpr FeatureRanges kPlateauRanges{12.0, 24.0, 3.0, 6.5};
constexpr double kFeatureGap = 4.0;
constexpr double kBorderMargin = 3.0;
constexpr int kPlacementAttempts = 60;

class FeaturePlacer {
 public:
  FeaturePlacer(const WorldConfig& cfg, const std::vector<float>& heights, const std::vector<CellKind>& kinds)
      : cfg_(cfg), heights_(heights), kinds_(kinds), nx_(cfg.cells_x()), nz_(cfg.cells_z()) {}

  // Min/max terrain over the cells whose centers fall inside the rectangle; returns false
  // when the rectangle touches a hazard cell.
  bool footprint_stats(double x0, double z0, double x1, double z1, double& lo, double& hi) const {
    const double cs = cfg_.cell_size;
    const int ix0 = std::clamp(static_cast<int>(std::floor(x0 / cs - 0.5)), 0, nx_ - 1);
    const int ix1 = std::clamp(static_cast<int>(std::ceil(x1 / cs - 0.5)), 0, nx_ - 1);
    const int iz0 = std::clamp(static_cast<int>(std::floor(z0 / cs - 0.5)), 0, nz_ - 1);
    const int iz1 = std::clamp(static_cast<int>(std::ceil(z1 / cs - 0.5)), 0, nz_ - 1);
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (int iz = iz0; iz <= iz1; ++iz) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const std::size_t i = static_cast<std::size_t>(iz) * nx_ + ix;
        if (kinds_[i] != CellKind::ground) return false;
        lo = std::min(lo, static_cast<double>(heights_[i]));
        hi = std::max(hi, static_cast<double>(heights_[i]));
      }
    }
    return true;
  }

  bool overlaps_existing(const Box& b) const {
    return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& o) {
      return b.min_x < o.max_x + kFeatureGap && o.min_x < b.max_x + kFeatureGap &&
             b.min_z < o.max_z + kFeatureGap && o.min_z < b.max_z + kFeatureGap;
    });
  }

  // Returns the index of the new box, or -1 when no spot was found.
  int place(RngStream& rng, const FeatureRanges& r) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double w = rng.uniform(r.min_size, r.max_size);
      const double d = rng.uniform(r.min_size, r.max_size);
      const double rise = rng.uniform(r.min_height, r.max_height);
      const double span_x = cfg_.extent_x - w - 2.0 * kBorderMargin;
      const double span_z = cfg_.extent_z - d - 2.0 * kBorderMargin;
      if (span_x <= 0.0 || span_z <= 0.0) return -1;
      Box b;
      b.min_x = kBorderMargin + rng.uniform() * span_x;
      b.min_z = kBorderMargin + rng.uniform() * span_z;
      b.max_x = b.min_x + w;
      b.max_z = b.min_z + d;
      if (overlaps_existing(b)) continue;
      double lo = 0.0;
      double hi = 0.0;
      if (!footprint_stats(b.min_x - 1.0, b.min_z - 1.0, b.max_x + 1.0, b.max_z + 1.0, lo, hi)) continue;
      b.bottom = lo - 1.0;
      b.top = std::min(hi + rise, cfg_.height_scale);
      if (b.top <= hi + 1.0) continue;
      double ring_lo = 0.0;
      double ring_hi = 0.0;
      footprint_stats(b.min_x - 2.0, b.min_z - 2.0, b.max_x + 2.0, b.max_z + 2.0, ring_lo, ring_hi);
      b.walkable_roof = (b.top - std::min(lo, ring_lo)) <= kMaxWalkableRoofRise;
      boxes_.push_back(b);
      return static_cast<int>(boxes_.size()) - 1;
    }
    return -1;
  }

  const std::vector<Box>& boxes() const { return boxes_; }
  std::vector<Box>& boxes() { return boxes_; }

 private:
  const WorldConfig& cfg_;
  const std::vector<float>& heights_;
  const std::vector<CellKind>& kinds_;
  int nx_;
  int nz_;
  std::vector<Box> boxes_;
};

double bilinear(const std::vector<float>& heights, int nx, int nz, double cs, double x, double z) {
  double u = std::clamp(x / cs - 0.5, 0.0, static_cast<double>(nx - 1));
  double v = std::clamp(z / cs - 0.5, 0.0, static_cast<double>(nz - 1));
  const int i0 = std::min(static_cast<int>(u), std::max(nx - 2, 0));
  const int j0 = std::min(static_cast<int>(v), std::max(nz - 2, 0));
  const int i1 = std::min(i0 + 1, nx - 1);
  const int j1 = std::min(j0 + 1, nz - 1);
  const double fu = u - i0;
  const double fv = v - j0;
  const auto at = [&](int i, int j) { return static_cast<double>(heights[static_cast<std::size_t>(j) * nx + i]); };
  const double h0 = at(i0, j0) + (at(i1, j0) - at(i0, j0)) * fu;
  const double h1 = at(i0, j1) + (at(i1, j1) - at(i0, j1)) * fu;
  return h0 + (h1 - h0) * fv;
}

}  // namespace

// ---------------------------------------------------------------------------
// WorldConfig

void WorldConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(extent_x > 0.0) || !std::isfinite(extent_x)) fail("extent_x must be positive");
  if (!(extent_z > 0.0) || !std::isfinite(extent_z)) fail("extent_z must be positive");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) fail("cell_size must be positive");
  if (!is_integral_ratio(extent_x, cell_size)) fail("extent_x must be a multiple of cell_size");
  if (!is_integral_ratio(extent_z, cell_size)) fail("extent_z must be a multiple of cell_size");
  if (!(height_scale > 0.0) || !std::isfinite(height_scale)) fail("height_scale must be positive");
  if (noise_octaves < 1 || noise_octaves > 16) fail("noise_octaves must be in [1, 16]");
  if (features.buildings < 0 || features.plateaus < 0 || features.jump_pads < 0)
    fail("feature_counts must be non-negative");
  if (!(hazard_fraction >= 0.0 && hazard_fraction <= 1.0)) fail("hazard_fraction must be in [0, 1]");
}

int WorldConfig::cells_x() const { return static_cast<int>(std::lround(extent_x / cell_size)); }
int WorldConfig::cells_z() const { return static_cast<int>(std::lround(extent_z / cell_size)); }

// ---------------------------------------------------------------------------
// TerrainMap

TerrainMap::TerrainMap(WorldConfig config, std::vector<float> heights, std::vector<CellKind> kinds,
                       std::vector<Box> boxes, std::vector<JumpPad> pads)
    : config_(config),
      nx_(config.cells_x()),
      nz_(config.cells_z()),
      heights_(std::move(heights)),
      kinds_(std::move(kinds)),
      boxes_(std::move(boxes)),
      pads_(std::move(pads)) {
  config_.validate();
  const std::size_t cells = static_cast<std::size_t>(nx_) * nz_;
  if (heights_.size() != cells) throw ConfigError("heights grid does not match extent / cell_size");
  if (kinds_.size() != cells) throw ConfigError("cell kind grid does not match extent / cell_size");
  for (const Box& b : boxes_) {
    if (!(b.max_x > b.min_x && b.max_z > b.min_z && b.top > b.bottom)) throw ConfigError("degenerate box");
  }
  const auto [lo, hi] = std::minmax_element(heights_.begin(), heights_.end());
  min_terrain_ = *lo;
  max_terrain_ = *hi;
  build_blocks();
  build_buckets();
  build_slots();
}

double TerrainMap::terrain_height(double x, double z) const {
  return bilinear(heights_, nx_, nz_, config_.cell_size, x, z);
}

CellKind TerrainMap::kind_at(double x, double z) const {
  const int ix = std::clamp(static_cast<int>(std::floor(x / config_.cell_size)), 0, nx_ - 1);
  const int iz = std::clamp(static_cast<int>(std::floor(z / config_.cell_size)), 0, nz_ - 1);
  return cell_kind(ix, iz);
}

std::span<const std::uint32_t> TerrainMap::boxes_near(double x, double z) const {
  if (bucket_offsets_.empty()) return {};
  const int bx = std::clamp(static_cast<int>(std::floor(x / kBucket)), 0, bucket_nx_ - 1);
  const int bz = std::clamp(static_cast<int>(std::floor(z / kBucket)), 0, bucket_nz_ - 1);
  const std::size_t b = static_cast<std::size_t>(bz) * bucket_nx_ + bx;
  return std::span<const std::uint32_t>(bucket_items_).subspan(bucket_offsets_[b],
                                                               bucket_offsets_[b + 1] - bucket_offsets_[b]);
}

int TerrainMap::top_box_at(double x, double z, double margin) const {
  int best = -1;
  for (std::uint32_t i : boxes_near(x, z)) {
    const Box& b = boxes_[i];
    if (b.footprint_contains(x, z, margin) && (best < 0 || b.top > boxes_[best].top)) best = static_cast<int>(i);
  }
  return best;
}

void TerrainMap::build_blocks() {
  bx_ = (nx_ + kBlock - 1) / kBlock;
  bz_ = (nz_ + kBlock - 1) / kBlock;
  block_max_.assign(static_cast<std::size_t>(bx_) * bz_, -std::numeric_limits<float>::infinity());
  for (int bz = 0; bz < bz_; ++bz) {
    for (int bx = 0; bx < bx_; ++bx) {
      // Bilinear values inside the block depend on one extra ring of cell centers.
      const int ix0 = std::max(bx * kBlock - 1, 0);
      const int ix1 = std::min(bx * kBlock + kBlock, nx_ - 1);
      const int iz0 = std::max(bz * kBlock - 1, 0);
      const int iz1 = std::min(bz * kBlock + kBlock, nz_ - 1);
      float m = -std::numeric_limits<float>::infinity();
      for (int iz = iz0; iz <= iz1; ++iz)
        for (int ix = ix0; ix <= ix1; ++ix) m = std::max(m, cell_height(ix, iz));
      block_max_[static_cast<std::size_t>(bz) * bx_ + bx] = m;
    }
  }
}

void TerrainMap::build_buckets() {
  bucket_nx_ = std::max(1, static_cast<int>(std::ceil(config_.extent_x / kBucket)));
  bucket_nz_ = std::max(1, static_cast<int>(std::ceil(config_.extent_z / kBucket)));
  const std::size_t nb = static_cast<std::size_t>(bucket_nx_) * bucket_nz_;
  std::vector<std::vector<std::uint32_t>> lists(nb);
  constexpr double kGrow = 1.0;
  for (std::uint32_t i = 0; i < boxes_.size(); ++i) {
    const Box& b = boxes_[i];
    const int x0 = std::clamp(static_cast<int>(std::floor((b.min_x - kGrow) / kBucket)), 0, bucket_nx_ - 1);
    const int x1 = std::clamp(static_cast<int>(std::floor((b.max_x + kGrow) / kBucket)), 0, bucket_nx_ - 1);
    const int z0 = std::clamp(static_cast<int>(std::floor((b.min_z - kGrow) / kBucket)), 0, bucket_nz_ - 1);
    const int z1 = std::clamp(static_cast<int>(std::floor((b.max_z + kGrow) / kBucket)), 0, bucket_nz_ - 1);
    for (int z = z0; z <= z1; ++z)
      for (int x = x0; x <= x1; ++x) lists[static_cast<std::size_t>(z) * bucket_nx_ + x].push_back(i);
  }
  bucket_offsets_.assign(nb + 1, 0);
  bucket_items_.clear();
  for (std::size_t b = 0; b < nb; ++b) {
    bucket_offsets_[b] = static_cast<std::uint32_t>(bucket_items_.size());
    bucket_items_.insert(bucket_items_.end(), lists[b].begin(), lists[b].end());
  }
  bucket_offsets_[nb] = static_cast<std::uint32_t>(bucket_items_.size());
}

void TerrainMap::build_slots() {
  slots_.clear();
  const double cs = config_.cell_size;
  for (int iz = 0; iz < nz_; ++iz) {
    for (int ix = 0; ix < nx_; ++ix) {
      const double x = (ix + 0.5) * cs;
      const double z = (iz + 0.5) * cs;
      const int b = top_box_at(x, z);
      if (b >= 0) {
        if (boxes_[b].walkable_roof) slots_.push_back({x, boxes_[b].top, z});
        continue;
      }
      if (cell_kind(ix, iz) != CellKind::ground) continue;
      if (top_box_at(x, z, kWallClearance) >= 0) continue;
      slots_.push_back({x, terrain_height(x, z), z});
    }
  }
}

// ---------------------------------------------------------------------------
// Generation and queries

TerrainMap generate_map(const WorldConfig& config) {
  config.validate();
  const int nx = config.cells_x();
  const int nz = config.cells_z();
  const std::size_t cells = static_cast<std::size_t>(nx) * nz;
  const double cs = config.cell_size;

  const PerlinNoise terrain_noise(derive_seed(config.seed, {kTerrainNoiseTag}));
  std::vector<float> heights(cells);
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      heights[static_cast<std::size_t>(iz) * nx + ix] =
          static_cast<float>(terrain_noise_height(terrain_noise, config, (ix + 0.5) * cs, (iz + 0.5) * cs));
    }
  }

  // Hazards flood the lowest cells; a second noise channel picks water or lava.
  std::vector<CellKind> kinds(cells, CellKind::ground);
  const auto hazard_count = static_cast<std::size_t>(std::floor(config.hazard_fraction * static_cast<double>(cells)));
  if (hazard_count > 0) {
    std::vector<std::uint32_t> order(cells);
    std::iota(order.begin(), order.end(), 0u);
    const auto lower = [&](std::uint32_t a, std::uint32_t b) {
      return heights[a] != heights[b] ? heights[a] < heights[b] : a < b;
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hazard_count - 1), order.end(), lower);
    const PerlinNoise hazard_noise(derive_seed(config.seed, {kHazardNoiseTag}));
    for (std::size_t k = 0; k < hazard_count; ++k) {
      const std::uint32_t i = order[k];
      const double x = (static_cast<double>(i % nx) + 0.5) * cs;
      const double z = (static_cast<double>(i / nx) + 0.5) * cs;
      kinds[i] = hazard_noise.noise(x / 150.0 + 0.31, z / 150.0 + 0.17) >= 0.0 ? CellKind::water : CellKind::lava;
    }
  }

  RngStream rng(derive_seed(config.seed, {kFeatureTag}));
  FeaturePlacer placer(config, heights, kinds);
  for (int i = 0; i < config.features.buildings; ++i) placer.place(rng, kBuildingRanges);
  std::vector<int> plateaus;
  for (int i = 0; i < config.features.plateaus; ++i) {
    const int idx = placer.place(rng, kPlateauRanges);
    if (idx >= 0) plateaus.push_back(idx);
  }

  // Jump pads sit just outside a plateau wall so the launch arc clears the roof edge.
  // The pad check runs against a provisional map that already carries every box.
  std::vector<JumpPad> pads;
  {
    const TerrainMap provisional(config, heights, kinds, placer.boxes(), {});
    const auto pad_ok = [&](double x, double z) {
      if (!provisional.in_extent(x, z)) return false;
      if (provisional.kind_at(x, z) != CellKind::ground) return false;
      if (provisional.top_box_at(x, z, 1.0) >= 0) return false;
      return std::none_of(pads.begin(), pads.end(), [&](const JumpPad& p) {
        return std::hypot(p.position.x - x, p.position.z - z) < 3.0;
      });
    };
    constexpr double kPadOffset = 1.6;
    for (int i = 0; i < config.features.jump_pads; ++i) {
      bool placed = false;
      if (!plateaus.empty()) {
        const Box& b = placer.boxes()[plateaus[static_cast<std::size_t>(i) % plateaus.size()]];
        const auto first_side = static_cast<int>(rng.below(4));
        for (int s = 0; s < 4 && !placed; ++s) {
          const int side = (first_side + s) % 4;
          const double t = rng.uniform(0.25, 0.75);
          double x = 0.0;
          double z = 0.0;
          switch (side) {
            case 0: x = b.min_x - kPadOffset; z = b.min_z + t * (b.max_z - b.min_z); break;
            case 1: x = b.max_x + kPadOffset; z = b.min_z + t * (b.max_z - b.min_z); break;
            case 2: z = b.min_z - kPadOffset; x = b.min_x + t * (b.max_x - b.min_x); break;
            default: z = b.max_z + kPadOffset; x = b.min_x + t * (b.max_x - b.min_x); break;
          }
          if (pad_ok(x, z)) {
            pads.push_back({{x, provisional.terrain_height(x, z), z}, 12.0, 1.0});
            placed = true;
          }
        }
      }
      for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
        const double x = rng.uniform(kBorderMargin, config.extent_x - kBorderMargin);
        const double z = rng.uniform(kBorderMargin, config.extent_z - kBorderMargin);
        if (pad_ok(x, z)) {
          pads.push_back({{x, provisional.terrain_height(x, z), z}, 12.0, 1.0});
          placed = true;
        }
      }
    }
  }

  TerrainMap map(config, std::move(heights), std::move(kinds), std::move(placer.boxes()), std::move(pads));
  const std::size_t region = largest_ground_region(map);
  if (static_cast<double>(region) < 0.2 * static_cast<double>(cells)) {
    throw GenerationError("largest connected ground region covers less than 20% of the map; lower hazard_fraction");
  }
  return map;
}

Position sample_navigable(const TerrainMap& map, RngStream& rng) {
  const auto slots = map.navigable_slots();
  if (slots.empty()) throw GenerationError("map has no navigable cells");
  return slots[rng.below(slots.size())];
}

bool is_navigable(const TerrainMap& map, const Position& p) {
  if (!p.finite() || !map.in_extent(p.x, p.z)) return false;
  constexpr double kBelowTolerance = 1e-6;
  const int b = map.top_box_at(p.x, p.z);
  if (b >= 0) {
    const Box& box = map.boxes()[b];
    if (!box.walkable_roof) return false;
    const double dy = p.y - box.top;
    return dy >= -kBelowTolerance && dy <= kNavigableHoverTolerance;
  }
  const double dy = p.y - map.terrain_height(p.x, p.z);
  if (dy < -kBelowTolerance || dy > kNavigableHoverTolerance) return false;
  return map.kind_at(p.x, p.z) == CellKind::ground;
}

std::size_t largest_ground_region(const TerrainMap& map) {
  const int nx = map.cells_x();
  const int nz = map.cells_z();
  const double cs = map.config().cell_size;
  std::vector<std::uint8_t> open(static_cast<std::size_t>(nx) * nz, 0);
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const bool free = map.cell_kind(ix, iz) == CellKind::ground && map.top_box_at((ix + 0.5) * cs, (iz + 0.5) * cs) < 0;
      open[static_cast<std::size_t>(iz) * nx + ix] = free ? 1 : 0;
    }
  }
  std::size_t best = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < open.size(); ++start) {
    if (open[start] != 1) continue;
    std::size_t size = 0;
    open[start] = 2;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      ++size;
      const int ix = static_cast<int>(c % nx);
      const int iz = static_cast<int>(c / nx);
      const auto visit = [&](int x, int z) {
        if (x < 0 || z < 0 || x >= nx || z >= nz) return;
        const std::size_t n = static_cast<std::size_t>(z) * nx + x;
        if (open[n] == 1) {
          open[n] = 2;
          queue.push_back(n);
        }
      };
      visit(ix - 1, iz);
      visit(ix + 1, iz);
      visit(ix, iz - 1);
      visit(ix, iz + 1);
    }
    best = std::max(best, size);
  }
  return best;
}

}  // namespace gnav
