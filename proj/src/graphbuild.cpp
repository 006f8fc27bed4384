#include "gnav/graphbuild.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <tuple>

#include "gnav/errors.hpp"
#include "gnav/parallel.hpp"
#include "gnav/spatial_index.hpp"

namespace gnav {
namespace {

constexpr std::uint64_t kPlacementTag = 0x706c616365ULL;  // "place"
// Draws allowed per vertex once the radius budget is spent.
constexpr int kFloorDrawLimit = 100000;

bool too_close(std::span<const Position> accepted, const Position& p, double radius) {
  const double r2 = radius * radius;
  return std::any_of(accepted.begin(), accepted.end(),
                     [&](const Position& q) { return squared_distance(p, q) < r2; });
}

}  // namespace

void BuildConfig::validate() const {
  if (n < 1) throw ConfigError("build.n must be at least 1");
  if (k < 1) throw ConfigError("build.k must be at least 1");
  if (repeats < 1) throw ConfigError("build.repeats must be at least 1");
  if (!(success_threshold > 0.0 && success_threshold <= 1.0)) throw ConfigError("build.success_threshold must be in (0, 1]");
  if (placement_retries < 0) throw ConfigError("build.placement_retries must be non-negative");
  if (!(radius_decay > 0.0 && radius_decay < 1.0)) throw ConfigError("build.radius_decay must be in (0, 1)");
  if (probe_max_steps < 1) throw ConfigError("build.probe_max_steps must be positive");
}

int BuildConfig::required_successes() const {
  return static_cast<int>(std::ceil(success_threshold * repeats - 1e-9));
}

std::vector<Position> place_unconstrained(const TerrainMap& map, int n, RngStream& rng) {
  if (n < 1) throw ConfigError("vertex count must be at least 1");
  if (static_cast<std::size_t>(n) > map.navigable_slots().size())
    throw GenerationError("map has fewer navigable positions than requested vertices");
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(n));
  std::set<std::tuple<double, double, double>> seen;
  while (out.size() < static_cast<std::size_t>(n)) {
    const Position p = sample_navigable(map, rng);
    if (seen.emplace(p.x, p.y, p.z).second) out.push_back(p);
  }
  return out;
}

ConstrainedPlacement place_distance_constrained(const TerrainMap& map, int n, RngStream& rng, int retries,
                                                double decay) {
  if (n < 1) throw ConfigError("vertex count must be at least 1");
  if (retries < 0 || !(decay > 0.0 && decay < 1.0)) throw ConfigError("invalid placement decay schedule");
  ConstrainedPlacement out;
  out.initial_radius = std::sqrt(map.config().extent_x * map.config().extent_z / n);
  double radius = out.initial_radius;
  int decays_left = retries;
  out.vertices.reserve(static_cast<std::size_t>(n));
  while (out.vertices.size() < static_cast<std::size_t>(n)) {
    int floor_draws = 0;
    for (;;) {
      const Position p = sample_navigable(map, rng);
      if (!too_close(out.vertices, p, radius)) {
        out.vertices.push_back(p);
        out.final_radius = radius;
        break;
      }
      if (decays_left > 0) {
        radius *= decay;
        --decays_left;
      } else if (++floor_draws > kFloorDrawLimit) {
        throw GenerationError("cannot place " + std::to_string(n) + " vertices at the minimum separation");
      }
    }
  }
  return out;
}

std::vector<std::pair<VertexId, VertexId>> knn_candidates(std::span<const Position> vertices, int k) {
  std::vector<std::pair<VertexId, VertexId>> out;
  if (vertices.size() < 2 || k < 1) return out;
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), vertices.size() - 1);
  const SpatialGrid grid(vertices);
  out.reserve(vertices.size() * kk);
  for (VertexId i = 0; i < vertices.size(); ++i) {
    for (const VertexId j : grid.nearest(vertices[i], kk, i)) out.emplace_back(i, j);
  }
  return out;
}

double probe_heading(std::uint64_t build_seed, VertexId src, VertexId dst, int repeat) {
  RngStream rng(derive_seed(derive_seed(build_seed, {src, dst}), {static_cast<std::uint64_t>(repeat)}));
  return rng.uniform(-kPi, kPi);
}

ProbeOutcome probe_edge(const TerrainMap& map, const Position& src, const Position& dst, VertexId src_id,
                        VertexId dst_id, const PolicySpec& policy, const BuildConfig& cfg, const SimConfig& sim) {
  SimConfig probe_sim = sim;
  probe_sim.reward.max_episode_steps = std::min(sim.reward.max_episode_steps, cfg.probe_max_steps);
  const auto controller = make_policy(policy);
  const int needed = cfg.required_successes();

  ProbeOutcome out;
  std::vector<int> steps;
  for (int r = 0; r < cfg.repeats; ++r) {
    if (out.successes + (cfg.repeats - r) < needed) break;
    EpisodeOptions options;
    options.initial_heading = probe_heading(cfg.seed, src_id, dst_id, r);
    const EpisodeResult res = run_episode(map, src, dst, *controller, probe_sim, options);
    ++out.episodes;
    if (res.success) {
      ++out.successes;
      steps.push_back(res.steps);
    }
  }
  if (out.successes >= needed && !steps.empty()) {
    std::sort(steps.begin(), steps.end());
    out.cost = static_cast<EdgeCost>(std::max(1, steps[(steps.size() - 1) / 2]));
  }
  return out;
}

NavGraph build_graph(const TerrainMap& map, const BuildConfig& cfg, const PolicySpec& policy, const SimConfig& sim,
                     int jobs) {
  cfg.validate();
  policy.validate();
  sim.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RngStream rng(derive_seed(cfg.seed, {kPlacementTag}));
  BuildMeta meta;
  meta.method = cfg.method;
  meta.n_requested = cfg.n;
  meta.k_requested = cfg.k;
  meta.repeats = cfg.repeats;
  meta.success_threshold = cfg.success_threshold;
  meta.seed = cfg.seed;

  std::vector<Position> vertices;
  if (cfg.method == PlacementMethod::distance_constrained) {
    ConstrainedPlacement placed =
        place_distance_constrained(map, cfg.n, rng, cfg.placement_retries, cfg.radius_decay);
    vertices = std::move(placed.vertices);
    meta.initial_radius = placed.initial_radius;
    meta.final_radius = placed.final_radius;
  } else {
    vertices = place_unconstrained(map, cfg.n, rng);
  }
  meta.k_effective = std::min(cfg.k, static_cast<int>(vertices.size()) - 1);

  const auto candidates = knn_candidates(vertices, cfg.k);
  meta.candidate_edges = candidates.size();
  std::vector<ProbeOutcome> outcomes(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    const auto [s, d] = candidates[i];
    outcomes[i] = probe_edge(map, vertices[s], vertices[d], s, d, policy, cfg, sim);
  });

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    meta.probe_episodes += static_cast<std::size_t>(outcomes[i].episodes);
    if (outcomes[i].cost) edges.push_back({candidates[i].first, candidates[i].second, *outcomes[i].cost});
  }
  meta.build_wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return NavGraph(std::move(vertices), std::move(edges), meta);
}

}  // namespace gnav
