#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "gnav/errors.hpp"
#include "gnav/worldgen.hpp"

using namespace gnav;

namespace {

// Independent gradient-noise reference: classic improved-noise lattice with the same
// seeded permutation, written from the textbook formulation.
struct ReferencePerlin {
  int p[512];
  explicit ReferencePerlin(std::uint64_t seed) {
    int base[256];
    for (int i = 0; i < 256; ++i) base[i] = i;
    RngStream rng(seed);
    for (int i = 255; i > 0; --i) std::swap(base[i], base[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    for (int i = 0; i < 512; ++i) p[i] = base[i & 255];
  }
  static double smooth(double t) { return 6 * std::pow(t, 5) - 15 * std::pow(t, 4) + 10 * std::pow(t, 3); }
  static double corner(int h, double x, double z) {
    static const double gx[8] = {1, -1, 1, -1, 1, -1, 0, 0};
    static const double gz[8] = {1, 1, -1, -1, 0, 0, 1, -1};
    return gx[h & 7] * x + gz[h & 7] * z;
  }
  double at(double x, double z) const {
    const int X = static_cast<int>(std::floor(x)) & 255;
    const int Z = static_cast<int>(std::floor(z)) & 255;
    const double fx = x - std::floor(x);
    const double fz = z - std::floor(z);
    const double c00 = corner(p[p[X] + Z], fx, fz);
    const double c10 = corner(p[p[X + 1] + Z], fx - 1, fz);
    const double c01 = corner(p[p[X] + Z + 1], fx, fz - 1);
    const double c11 = corner(p[p[X + 1] + Z + 1], fx - 1, fz - 1);
    const double u = smooth(fx);
    const double v = smooth(fz);
    const double bottom = c00 * (1 - u) + c10 * u;
    const double top = c01 * (1 - u) + c11 * u;
    return bottom * (1 - v) + top * v;
  }
  double fbm(double x, double z, int octaves) const {
    double total = 0.0;
    double weight = 0.0;
    for (int o = 0; o < octaves; ++o) {
      const double a = std::pow(0.5, o);
      total += a * at(x * std::pow(2.0, o), z * std::pow(2.0, o));
      weight += a;
    }
    return total / weight;
  }
};

WorldConfig small_world(std::uint64_t seed) {
  WorldConfig c;
  c.seed = seed;
  c.extent_x = 120;
  c.extent_z = 100;
  c.features = {3, 4, 4};
  return c;
}

}  // namespace

TEST(Perlin, MatchesReferenceImplementation) {
  for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
    const PerlinNoise noise(seed);
    const ReferencePerlin ref(seed);
    RngStream r(seed + 5);
    for (int i = 0; i < 2000; ++i) {
      const double x = r.uniform(-300.0, 300.0);
      const double z = r.uniform(-300.0, 300.0);
      ASSERT_NEAR(noise.noise(x, z), ref.at(x, z), 1e-12);
      ASSERT_NEAR(noise.fractal(x, z, 4), ref.fbm(x, z, 4), 1e-12);
    }
  }
}

TEST(Perlin, VanishesOnLatticePoints) {
  const PerlinNoise noise(3);
  for (int x = -5; x < 5; ++x)
    for (int z = -5; z < 5; ++z) EXPECT_EQ(noise.noise(x, z), 0.0);
}

TEST(Perlin, StaysWithinUnitRange) {
  const PerlinNoise noise(8);
  RngStream r(1);
  for (int i = 0; i < 20000; ++i) {
    const double v = noise.fractal(r.uniform(0, 50), r.uniform(0, 50), 6);
    ASSERT_LE(std::abs(v), 1.0);
  }
}

TEST(WorldConfig, RejectsInvalidFields) {
  WorldConfig c;
  c.extent_x = -5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.cell_size = 0.7;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.hazard_fraction = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.features.buildings = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  EXPECT_NO_THROW(c.validate());
}

TEST(GenerateMap, IsDeterministic) {
  const TerrainMap a = generate_map(small_world(17));
  const TerrainMap b = generate_map(small_world(17));
  EXPECT_TRUE(a == b);
  const TerrainMap c = generate_map(small_world(18));
  EXPECT_FALSE(a == c);
}

TEST(GenerateMap, TerrainHeightsFollowTheNoiseField) {
  const WorldConfig cfg = small_world(4);
  const TerrainMap map = generate_map(cfg);
  const ReferencePerlin ref(derive_seed(cfg.seed, {kTerrainNoiseTag}));
  const double relief = kTerrainReliefFraction * cfg.height_scale;
  for (int iz = 0; iz < map.cells_z(); iz += 7) {
    for (int ix = 0; ix < map.cells_x(); ix += 7) {
      const double x = ix + 0.5;
      const double z = iz + 0.5;
      const double expected = relief * (0.5 + 0.5 * ref.fbm(x / kTerrainWavelength, z / kTerrainWavelength, 4));
      ASSERT_NEAR(map.cell_height(ix, iz), expected, 1e-4);
    }
  }
}

TEST(GenerateMap, FloodsExactlyTheLowestCells) {
  const WorldConfig cfg = small_world(9);
  const TerrainMap map = generate_map(cfg);
  const auto kinds = map.kinds();
  const auto heights = map.heights();
  const auto expected = static_cast<std::size_t>(std::floor(cfg.hazard_fraction * kinds.size()));
  std::size_t hazards = 0;
  float highest_hazard = -1e9f;
  float lowest_ground = 1e9f;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] != CellKind::ground) {
      ++hazards;
      highest_hazard = std::max(highest_hazard, heights[i]);
    } else {
      lowest_ground = std::min(lowest_ground, heights[i]);
    }
  }
  EXPECT_EQ(hazards, expected);
  EXPECT_LE(highest_hazard, lowest_ground);
}

TEST(GenerateMap, KeepsALargeConnectedGroundRegion) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TerrainMap map = generate_map(small_world(seed));
    EXPECT_GE(static_cast<double>(largest_ground_region(map)), 0.2 * map.kinds().size());
  }
}

TEST(GenerateMap, RejectsMapsDrownedInHazards) {
  WorldConfig cfg = small_world(2);
  cfg.hazard_fraction = 0.95;
  EXPECT_THROW(generate_map(cfg), GenerationError);
}

TEST(GenerateMap, PlacesFeaturesInsideTheExtent) {
  const WorldConfig cfg = small_world(21);
  const TerrainMap map = generate_map(cfg);
  EXPECT_FALSE(map.boxes().empty());
  for (const Box& b : map.boxes()) {
    EXPECT_GE(b.min_x, 0.0);
    EXPECT_GE(b.min_z, 0.0);
    EXPECT_LE(b.max_x, cfg.extent_x);
    EXPECT_LE(b.max_z, cfg.extent_z);
    EXPECT_LT(b.bottom, map.terrain_height((b.min_x + b.max_x) / 2, (b.min_z + b.max_z) / 2));
  }
  for (const JumpPad& p : map.jump_pads()) {
    EXPECT_TRUE(map.in_extent(p.position.x, p.position.z));
    EXPECT_EQ(map.kind_at(p.position.x, p.position.z), CellKind::ground);
  }
}

TEST(TerrainMap, BilinearHeightInterpolatesCellCenters) {
  const WorldConfig cfg = small_world(6);
  const TerrainMap map = generate_map(cfg);
  EXPECT_NEAR(map.terrain_height(10.5, 20.5), map.cell_height(10, 20), 1e-9);
  const double mid = map.terrain_height(11.0, 20.5);
  EXPECT_NEAR(mid, 0.5 * (map.cell_height(10, 20) + map.cell_height(11, 20)), 1e-6);
  // Clamped at the border.
  EXPECT_NEAR(map.terrain_height(0.0, 0.0), map.cell_height(0, 0), 1e-9);
}

TEST(Navigable, SlotsAllPassTheNavigabilityCheck) {
  const TerrainMap map = generate_map(small_world(12));
  ASSERT_FALSE(map.navigable_slots().empty());
  for (const Position& p : map.navigable_slots()) ASSERT_TRUE(is_navigable(map, p));
}

TEST(Navigable, RejectsHazardsBoxesAndFloatingPoints) {
  const TerrainMap lava = fixtures::lava_strip_map(40, 20, 10, 20);
  EXPECT_TRUE(is_navigable(lava, {5.5, 0.0, 5.5}));
  EXPECT_FALSE(is_navigable(lava, {15.5, -0.5, 5.5}));
  EXPECT_FALSE(is_navigable(lava, {5.5, 2.0, 5.5}));
  EXPECT_FALSE(is_navigable(lava, {-1.0, 0.0, 5.5}));

  const TerrainMap boxed = fixtures::flat_map(40, 40, 0.0, {{10, 10, 20, 20, -1, 4, true}, {25, 25, 30, 30, -1, 50, false}});
  EXPECT_TRUE(is_navigable(boxed, {15, 4, 15}));
  EXPECT_FALSE(is_navigable(boxed, {15, 0, 15}));
  EXPECT_FALSE(is_navigable(boxed, {27, 50, 27}));
}

TEST(Navigable, SamplerIsUniformOverSlotsAndDeterministic) {
  const TerrainMap map = fixtures::flat_map(1, 1, 2.0);
  RngStream rng(1);
  const Position p = sample_navigable(map, rng);
  EXPECT_EQ(p, (Position{0.5, 2.0, 0.5}));

  const TerrainMap big = generate_map(small_world(3));
  RngStream a(5);
  RngStream b(5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(sample_navigable(big, a), sample_navigable(big, b));
}

TEST(Navigable, SamplerFailsWithoutNavigableCells) {
  const TerrainMap map = fixtures::lava_strip_map(10, 10, 0, 10);
  RngStream rng(1);
  EXPECT_THROW(sample_navigable(map, rng), GenerationError);
}

TEST(Navigable, SlotsKeepClearOfWalls) {
  const TerrainMap map = fixtures::flat_map(40, 40, 0.0, {{10, 10, 20, 20, -1, 50, false}});
  for (const Position& p : map.navigable_slots()) {
    const double dx = std::max({10.0 - p.x, 0.0, p.x - 20.0});
    const double dz = std::max({10.0 - p.z, 0.0, p.z - 20.0});
    ASSERT_GE(std::max(dx, dz), kWallClearance);
  }
}
