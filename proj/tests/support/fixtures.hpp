#pragma once

#include <vector>

#include "gnav/nav_graph.hpp"
#include "gnav/worldgen.hpp"

namespace gnav::fixtures {

/// Level ground at height h, no features.
TerrainMap flat_map(double extent_x, double extent_z, double h = 0.0, std::vector<Box> boxes = {},
                    std::vector<JumpPad> pads = {});

/// Flat ground with a lava strip spanning the full depth for x in [x0, x1).
TerrainMap lava_strip_map(double extent_x, double extent_z, double x0, double x1);

/// 80 x 80 m ground with a courtyard closed by 6 m walls. A row of jump pads outside the
/// west wall launches walkers over it; nothing inside leads back out.
struct Courtyard {
  TerrainMap map;
  Position outside;
  Position inside;
};
Courtyard courtyard_map();

/// Two 5 m plateaus separated by a 16 m gap, a jump pad next to the far plateau and a
/// hand-built graph whose cheapest route walks off the near plateau into the gap.
struct LedgeRoutes {
  TerrainMap map;
  NavGraph graph;
  Position start;
  Position goal;
};
LedgeRoutes ledge_routes();

}  // namespace gnav::fixtures
