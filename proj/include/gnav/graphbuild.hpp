#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gnav/localnav.hpp"
#include "gnav/nav_graph.hpp"
#include "gnav/simkernel.hpp"
#include "gnav/worldgen.hpp"

namespace gnav {

struct BuildConfig {
  PlacementMethod method = PlacementMethod::distance_constrained;
  int n = 400;
  int k = 10;
  int repeats = 4;
  double success_threshold = 0.75;
  int placement_retries = 100;
  double radius_decay = 0.98;
  int probe_max_steps = 600;
  std::uint64_t seed = 0;

  void validate() const;
  /// Successful repeats needed to accept an edge.
  int required_successes() const;
  bool operator==(const BuildConfig&) const = default;
};

std::vector<Position> place_unconstrained(const TerrainMap& map, int n, RngStream& rng);

struct ConstrainedPlacement {
  std::vector<Position> vertices;
  double initial_radius = 0.0;
  double final_radius = 0.0;  // radius in force at the last acceptance
};

/// Greedy min-separation placement. The separation radius starts at sqrt(area / n) and
/// shrinks by `decay` after each rejected draw, at most `retries` times over the whole run,
/// so every pair stays at least initial_radius * decay^retries apart.
ConstrainedPlacement place_distance_constrained(const TerrainMap& map, int n, RngStream& rng, int retries = 100,
                                                double decay = 0.98);

/// Directed candidate pairs to each vertex's k nearest neighbors, ordered by (src, distance, id).
/// k is clamped to |vertices| - 1.
std::vector<std::pair<VertexId, VertexId>> knn_candidates(std::span<const Position> vertices, int k);

struct ProbeOutcome {
  std::optional<EdgeCost> cost;
  int episodes = 0;
  int successes = 0;
};

/// Spawn heading for probe repeat r of edge src -> dst.
double probe_heading(std::uint64_t build_seed, VertexId src, VertexId dst, int repeat);

/// Runs up to cfg.repeats probe episodes; stops early once the threshold is out of reach.
/// Cost is the lower median of the successful step counts.
ProbeOutcome probe_edge(const TerrainMap& map, const Position& src, const Position& dst, VertexId src_id,
                        VertexId dst_id, const PolicySpec& policy, const BuildConfig& cfg, const SimConfig& sim);

/// `jobs` = 0 uses every hardware thread. The result does not depend on `jobs`.
NavGraph build_graph(const TerrainMap& map, const BuildConfig& cfg, const PolicySpec& policy, const SimConfig& sim,
                     int jobs = 0);

}  // namespace gnav
