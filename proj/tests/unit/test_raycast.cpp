#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gnav/worldgen.hpp"

using namespace gnav;

namespace {

// Fine fixed-step march against terrain and boxes; slow but obviously correct.
double marched_distance(const TerrainMap& map, const Position& o, const Vec3& d, double max_dist) {
  constexpr double kStep = 0.002;
  for (double t = 0.0; t <= max_dist; t += kStep) {
    const Position p = o + d * t;
    if (map.in_extent(p.x, p.z) && p.y <= map.terrain_height(p.x, p.z)) return t;
    for (const Box& b : map.boxes()) {
      if (p.x >= b.min_x && p.x <= b.max_x && p.z >= b.min_z && p.z <= b.max_z && p.y >= b.bottom && p.y <= b.top)
        return t;
    }
  }
  return max_dist;
}

Vec3 unit(double x, double y, double z) { return normalized({x, y, z}); }

}  // namespace

TEST(Raycast, FlatPlaneHitMatchesClosedForm) {
  const TerrainMap map = fixtures::flat_map(100, 100, 2.0);
  const Position o{10, 12, 10};
  for (double pitch : {-0.2, -0.5, -1.0, -1.5}) {
    const Vec3 d = unit(std::cos(pitch), std::sin(pitch), 0.0);
    const double expected = 10.0 / -d.y;
    EXPECT_NEAR(raycast(map, o, d, 500.0), std::min(expected, 500.0), 1e-6) << pitch;
  }
}

TEST(Raycast, StraightDownHitsTheGround) {
  const TerrainMap map = fixtures::flat_map(20, 20, 1.5);
  EXPECT_NEAR(raycast(map, {5, 4, 5}, {0, -1, 0}, 50.0), 2.5, 1e-9);
}

TEST(Raycast, LevelOrRisingRayMissesFlatGround) {
  const TerrainMap map = fixtures::flat_map(50, 50, 0.0);
  EXPECT_EQ(raycast(map, {5, 1, 5}, {1, 0, 0}, 30.0), 30.0);
  EXPECT_EQ(raycast(map, {5, 1, 5}, unit(1, 1, 0), 30.0), 30.0);
}

TEST(Raycast, BoxFaceHitMatchesClosedForm) {
  const TerrainMap map = fixtures::flat_map(60, 60, 0.0, {{20, 20, 30, 30, -1, 5, false}});
  EXPECT_NEAR(raycast(map, {10, 1, 25}, {1, 0, 0}, 100.0), 10.0, 1e-9);
  EXPECT_NEAR(raycast(map, {25, 1, 50}, {0, 0, -1}, 100.0), 20.0, 1e-9);
  // Passes over the roof.
  EXPECT_EQ(raycast(map, {10, 6, 25}, {1, 0, 0}, 40.0), 40.0);
  // Diagonal onto the roof: 3 m drop at 45 degrees.
  EXPECT_NEAR(raycast(map, {22, 8, 25}, unit(1, -1, 0), 40.0), 3.0 * std::sqrt(2.0), 1e-9);
}

TEST(Raycast, OriginInsideABoxReportsZero) {
  const TerrainMap map = fixtures::flat_map(60, 60, 0.0, {{20, 20, 30, 30, -1, 5, false}});
  EXPECT_EQ(raycast(map, {25, 2, 25}, {1, 0, 0}, 10.0), 0.0);
}

TEST(Raycast, RespectsMaxDistance) {
  const TerrainMap map = fixtures::flat_map(60, 60, 0.0, {{20, 20, 30, 30, -1, 5, false}});
  EXPECT_EQ(raycast(map, {10, 1, 25}, {1, 0, 0}, 4.0), 4.0);
}

TEST(Raycast, LeavingTheExtentHitsNothing) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  EXPECT_EQ(raycast(map, {10, 1, 10}, unit(1, -0.01, 0), 50.0), 50.0);
}

TEST(Raycast, CandidateListRestrictsBoxTests) {
  const TerrainMap map = fixtures::flat_map(60, 60, 0.0, {{20, 20, 30, 30, -1, 5, false}});
  const std::vector<std::uint32_t> none;
  EXPECT_EQ(raycast(map, {10, 1, 25}, {1, 0, 0}, 40.0, none), 40.0);
}

TEST(Raycast, AgreesWithFineMarchOnGeneratedTerrain) {
  WorldConfig cfg;
  cfg.seed = 31;
  cfg.extent_x = 120;
  cfg.extent_z = 120;
  const TerrainMap map = generate_map(cfg);
  RngStream rng(4);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const double x = rng.uniform(5, 115);
    const double z = rng.uniform(5, 115);
    const Position o{x, map.terrain_height(x, z) + rng.uniform(0.3, 6.0), z};
    const double yaw = rng.uniform(-kPi, kPi);
    const double pitch = rng.uniform(-0.6, 0.2);
    const Vec3 d{std::cos(pitch) * std::sin(yaw), std::sin(pitch), std::cos(pitch) * std::cos(yaw)};
    const double fast = raycast(map, o, d, 25.0);
    const double slow = marched_distance(map, o, d, 25.0);
    if (slow < 25.0) ++hits;
    ASSERT_NEAR(fast, slow, 0.01) << "ray " << i;
  }
  EXPECT_GT(hits, 50);
}
