#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gnav/localnav.hpp"
#include "gnav/nav_graph.hpp"
#include "gnav/simkernel.hpp"

namespace gnav {

struct GraphPath {
  std::vector<VertexId> vertices;
  std::uint64_t cost = 0;
};

struct Plan {
  std::vector<Position> waypoints;  // vertex positions followed by the raw goal
  std::vector<VertexId> vertex_path;
  std::uint64_t total_cost = 0;
  VertexId src_vertex = 0;
  VertexId dst_vertex = 0;
};

struct HybridConfig {
  int stall_replan_steps = 50;
  double waypoint_radius = 2.0;
  int max_replans = 10;
  bool replanning = true;

  void validate() const;
  bool operator==(const HybridConfig&) const = default;
};

/// Closest vertex, lowest id on ties. Throws PlanningError on an empty graph.
VertexId nearest_vertex(const NavGraph& graph, const Position& p);

/// Dijkstra over directed edges. Among equal-cost paths the lexicographically smallest
/// vertex sequence is returned. Throws PlanningError on invalid ids.
std::optional<GraphPath> shortest_path(const NavGraph& graph, VertexId src, VertexId dst);

std::optional<Plan> plan(const NavGraph& graph, const Position& start, const Position& goal);

struct HybridResult {
  EpisodeResult episode;
  int replans = 0;
  int plans = 0;
  double plan_ms = 0.0;  // wall time spent planning, all attempts
};

/// Follows graph waypoints with the local policy. When no waypoint distance improvement
/// happens for stall_replan_steps ticks, replans from the current position. Without
/// replanning, or once max_replans is used up, a stall of reward.no_progress_limit ticks
/// ends the episode.
HybridResult navigate_hybrid(const TerrainMap& map, const NavGraph& graph, LocalPolicy& policy,
                             const Position& start, const Position& goal, const HybridConfig& hcfg,
                             const SimConfig& cfg, const EpisodeOptions& options = {});

}  // namespace gnav
