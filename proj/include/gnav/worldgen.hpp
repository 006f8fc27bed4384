#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnav/geometry.hpp"
#include "gnav/rng.hpp"

namespace gnav {

enum class CellKind : std::uint8_t { ground = 0, water = 1, lava = 2 };

struct FeatureCounts {
  int buildings = 8;
  int plateaus = 12;
  int jump_pads = 12;
  bool operator==(const FeatureCounts&) const = default;
};

struct WorldConfig {
  std::uint64_t seed = 0;
  double extent_x = 250.0;
  double extent_z = 250.0;
  double height_scale = 80.0;  // vertical budget: terrain relief plus the tallest box
  double cell_size = 1.0;
  int noise_octaves = 4;
  FeatureCounts features;
  double hazard_fraction = 0.12;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  int cells_x() const;
  int cells_z() const;
  bool operator==(const WorldConfig&) const = default;
};

struct JumpPad {
  Position position;
  double impulse = 12.0;  // vertical launch speed, m/s
  double radius = 1.0;
  bool operator==(const JumpPad&) const = default;
};

/// Horizontal clearance the sampler keeps from box walls (agent radius plus a margin).
inline constexpr double kWallClearance = 0.5;
/// Roofs higher than this above the ground around them are not walkable.
inline constexpr double kMaxWalkableRoofRise = 40.0;
/// is_navigable accepts points up to this far above the walkable surface.
inline constexpr double kNavigableHoverTolerance = 0.5;

/// Heightfield world with box and jump-pad overlays. Immutable once constructed;
/// the derived acceleration structures (block maxima, box buckets, navigable slots)
/// are rebuilt from the raw data so a loaded map behaves exactly like a generated one.
class TerrainMap {
 public:
  /// Heights and kinds are row-major, index = iz * cells_x + ix, sampled at cell centers.
  TerrainMap(WorldConfig config, std::vector<float> heights, std::vector<CellKind> kinds,
             std::vector<Box> boxes, std::vector<JumpPad> pads);

  const WorldConfig& config() const { return config_; }
  int cells_x() const { return nx_; }
  int cells_z() const { return nz_; }
  std::span<const float> heights() const { return heights_; }
  std::span<const CellKind> kinds() const { return kinds_; }
  std::span<const Box> boxes() const { return boxes_; }
  std::span<const JumpPad> jump_pads() const { return pads_; }

  bool in_extent(double x, double z) const {
    return x >= 0.0 && z >= 0.0 && x <= config_.extent_x && z <= config_.extent_z;
  }
  float cell_height(int ix, int iz) const { return heights_[static_cast<std::size_t>(iz) * nx_ + ix]; }
  CellKind cell_kind(int ix, int iz) const { return kinds_[static_cast<std::size_t>(iz) * nx_ + ix]; }
  /// Bilinear terrain height between cell centers, clamped at the border.
  double terrain_height(double x, double z) const;
  /// Kind of the cell containing (x, z); positions outside the extent are clamped.
  CellKind kind_at(double x, double z) const;
  double min_terrain() const { return min_terrain_; }
  double max_terrain() const { return max_terrain_; }

  /// Index of the highest box whose footprint (grown by margin) contains (x, z), or -1.
  int top_box_at(double x, double z, double margin = 0.0) const;
  /// Box indices whose footprint (grown by up to 1 m) may touch (x, z).
  std::span<const std::uint32_t> boxes_near(double x, double z) const;

  /// Cell-center positions that satisfy is_navigable with clearance from walls.
  std::span<const Position> navigable_slots() const { return slots_; }

  // Coarse max-height grid used to skip empty space when ray marching.
  int block_cells() const { return kBlock; }
  int blocks_x() const { return bx_; }
  int blocks_z() const { return bz_; }
  float block_max(int bx, int bz) const { return block_max_[static_cast<std::size_t>(bz) * bx_ + bx]; }

  bool operator==(const TerrainMap& o) const {
    return config_ == o.config_ && heights_ == o.heights_ && kinds_ == o.kinds_ && boxes_ == o.boxes_ &&
           pads_ == o.pads_;
  }

 private:
  static constexpr int kBlock = 8;
  static constexpr double kBucket = 16.0;

  void build_blocks();
  void build_buckets();
  void build_slots();

  WorldConfig config_;
  int nx_ = 0;
  int nz_ = 0;
  std::vector<float> heights_;
  std::vector<CellKind> kinds_;
  std::vector<Box> boxes_;
  std::vector<JumpPad> pads_;

  double min_terrain_ = 0.0;
  double max_terrain_ = 0.0;
  int bx_ = 0;
  int bz_ = 0;
  std::vector<float> block_max_;
  int bucket_nx_ = 0;
  int bucket_nz_ = 0;
  std::vector<std::uint32_t> bucket_offsets_;
  std::vector<std::uint32_t> bucket_items_;
  std::vector<Position> slots_;
};

/// Fractal 2D Perlin noise with a seeded permutation table.
class PerlinNoise {
 public:
  explicit PerlinNoise(std::uint64_t seed);
  /// Single octave, roughly in [-1, 1].
  double noise(double x, double z) const;
  /// Sum of octaves with lacunarity 2 and gain 0.5, normalized by the amplitude sum.
  double fractal(double x, double z, int octaves) const;

 private:
  std::uint8_t perm_[512];
};

/// Seed tags that keep the noise channels independent.
inline constexpr std::uint64_t kTerrainNoiseTag = 0x7465727261696eULL;  // "terrain"
inline constexpr std::uint64_t kHazardNoiseTag = 0x68617a617264ULL;     // "hazard"
inline constexpr std::uint64_t kFeatureTag = 0x666561747572ULL;         // "featur"

/// Wavelength of the lowest terrain octave, meters.
inline constexpr double kTerrainWavelength = 100.0;
/// Terrain relief as a fraction of the vertical budget.
inline constexpr double kTerrainReliefFraction = 0.4;

/// Terrain height at world (x, z) before quantization to float.
double terrain_noise_height(const PerlinNoise& noise, const WorldConfig& config, double x, double z);

TerrainMap generate_map(const WorldConfig& config);

/// Uniform draw over the navigable slots of the map. Throws GenerationError when there are none.
Position sample_navigable(const TerrainMap& map, RngStream& rng);

bool is_navigable(const TerrainMap& map, const Position& p);

/// Distance along `direction` (unit length) to the first terrain or box hit, or max_dist.
double raycast(const TerrainMap& map, const Position& origin, const Vec3& direction, double max_dist);

/// Same as raycast but only tests the listed boxes (a caller-side broad phase).
double raycast(const TerrainMap& map, const Position& origin, const Vec3& direction, double max_dist,
               std::span<const std::uint32_t> candidate_boxes);

/// Size of the largest 4-connected region of uncovered ground cells.
std::size_t largest_ground_region(const TerrainMap& map);

}  // namespace gnav
