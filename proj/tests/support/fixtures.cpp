#include "fixtures.hpp"

#include <cmath>

namespace gnav::fixtures {
namespace {

WorldConfig fixture_config(double extent_x, double extent_z) {
  WorldConfig c;
  c.extent_x = extent_x;
  c.extent_z = extent_z;
  c.height_scale = 20.0;
  c.features = {0, 0, 0};
  c.hazard_fraction = 0.0;
  return c;
}

Box solid(double x0, double z0, double x1, double z1, double top, bool walkable) {
  return {x0, z0, x1, z1, -1.0, top, walkable};
}

}  // namespace

TerrainMap flat_map(double extent_x, double extent_z, double h, std::vector<Box> boxes, std::vector<JumpPad> pads) {
  const WorldConfig c = fixture_config(extent_x, extent_z);
  const auto cells = static_cast<std::size_t>(c.cells_x()) * c.cells_z();
  return TerrainMap(c, std::vector<float>(cells, static_cast<float>(h)), std::vector<CellKind>(cells, CellKind::ground),
                    std::move(boxes), std::move(pads));
}

TerrainMap lava_strip_map(double extent_x, double extent_z, double x0, double x1) {
  const WorldConfig c = fixture_config(extent_x, extent_z);
  const int nx = c.cells_x();
  const int nz = c.cells_z();
  std::vector<float> heights(static_cast<std::size_t>(nx) * nz, 0.0f);
  std::vector<CellKind> kinds(heights.size(), CellKind::ground);
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = (ix + 0.5) * c.cell_size;
      if (x >= x0 && x < x1) {
        kinds[static_cast<std::size_t>(iz) * nx + ix] = CellKind::lava;
        heights[static_cast<std::size_t>(iz) * nx + ix] = -0.5f;
      }
    }
  }
  return TerrainMap(c, std::move(heights), std::move(kinds), {}, {});
}

Courtyard courtyard_map() {
  // Interior x, z in [31, 49]; walls are 1 m thick.
  std::vector<Box> walls = {
      solid(30, 30, 31, 50, 6.0, false),  // west
      solid(49, 30, 50, 50, 6.0, false),  // east
      solid(30, 30, 50, 31, 6.0, false),  // south
      solid(30, 49, 50, 50, 6.0, false),  // north
  };
  std::vector<JumpPad> pads;
  for (double z = 32.0; z <= 48.0; z += 2.0) pads.push_back({{27.0, 0.0, z}, 12.0, 1.5});
  return {flat_map(80, 80, 0.0, std::move(walls), std::move(pads)), {18.0, 0.0, 40.0}, {42.0, 0.0, 40.0}};
}

LedgeRoutes ledge_routes() {
  std::vector<Box> plateaus = {solid(20, 20, 36, 40, 5.0, true), solid(52, 20, 80, 40, 5.0, true)};
  std::vector<JumpPad> pads = {{{61.0, 0.0, 17.0}, 12.0, 2.0}};
  TerrainMap map = flat_map(100, 60, 0.0, std::move(plateaus), std::move(pads));
  std::vector<Position> vertices = {
      {28.0, 5.0, 30.0},  // 0: start plateau
      {34.0, 5.0, 30.0},  // 1: its east ledge
      {70.0, 5.0, 30.0},  // 2: far plateau
      {44.0, 0.0, 30.0},  // 3: gap floor
      {44.0, 0.0, 12.0},  // 4: south of the gap
      {61.0, 0.0, 17.0},  // 5: jump pad
  };
  std::vector<Edge> edges = {{0, 1, 60}, {1, 2, 200}, {3, 4, 180}, {4, 5, 170}, {5, 2, 150}};
  NavGraph graph(std::move(vertices), std::move(edges));
  return {std::move(map), std::move(graph), {28.0, 5.0, 30.0}, {75.0, 5.0, 30.0}};
}

}  // namespace gnav::fixtures
