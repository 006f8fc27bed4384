#include "gnav/planner.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "gnav/errors.hpp"

namespace gnav {

void HybridConfig::validate() const {
  if (stall_replan_steps <= 0) throw ConfigError("hybrid.stall_replan_steps must be positive");
  if (!(waypoint_radius > 0.0)) throw ConfigError("hybrid.waypoint_radius must be positive");
  if (max_replans < 0) throw ConfigError("hybrid.max_replans must be non-negative");
}

VertexId nearest_vertex(const NavGraph& graph, const Position& p) {
  if (graph.empty()) throw PlanningError("cannot snap to an empty graph");
  return graph.index().nearest_one(p);
}

std::optional<GraphPath> shortest_path(const NavGraph& graph, VertexId src, VertexId dst) {
  const std::size_t n = graph.vertex_count();
  if (src >= n || dst >= n) throw PlanningError("vertex id out of range");
  if (src == dst) return GraphPath{{src}, 0};

  // Distances to dst over reversed arcs; src is settled once its optimum is known.
  constexpr auto kUnreached = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> dist(n, kUnreached);
  using Item = std::pair<std::uint64_t, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[dst] = 0;
  heap.emplace(0, dst);
  bool found = false;
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[u]) continue;
    if (u == src) {
      found = true;
      break;
    }
    for (const auto& arc : graph.in_arcs(u)) {
      const std::uint64_t nd = d + arc.cost;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.emplace(nd, arc.to);
      }
    }
  }
  if (!found) return std::nullopt;

  GraphPath path{{src}, dist[src]};
  for (VertexId u = src; u != dst;) {
    // Out arcs are sorted by target id, so the first tight arc is the smallest next id.
    for (const auto& arc : graph.out_arcs(u)) {
      if (dist[arc.to] != kUnreached && dist[arc.to] + arc.cost == dist[u]) {
        u = arc.to;
        break;
      }
    }
    path.vertices.push_back(u);
  }
  return path;
}

std::optional<Plan> plan(const NavGraph& graph, const Position& start, const Position& goal) {
  Plan p;
  p.src_vertex = nearest_vertex(graph, start);
  p.dst_vertex = nearest_vertex(graph, goal);
  auto path = shortest_path(graph, p.src_vertex, p.dst_vertex);
  if (!path) return std::nullopt;
  p.vertex_path = std::move(path->vertices);
  p.total_cost = path->cost;
  p.waypoints.reserve(p.vertex_path.size() + 1);
  for (const VertexId v : p.vertex_path) p.waypoints.push_back(graph.vertex(v));
  p.waypoints.push_back(goal);
  return p;
}

namespace {

constexpr std::int64_t kGoalWaypoint = -1;

class WaypointFollower {
 public:
  explicit WaypointFollower(const HybridConfig& hcfg) : hcfg_(hcfg) {}

  /// Switches to a new plan. When the new route only revisits already reached vertices
  /// before the current target, the current target is kept instead of backtracking.
  void set_plan(const Plan& p, const Position& here) {
    std::vector<std::int64_t> ids(p.vertex_path.begin(), p.vertex_path.end());
    ids.push_back(kGoalWaypoint);
    std::size_t start = 0;
    if (!ids_.empty()) {
      const std::int64_t current = ids_[index_];
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (ids[j] == current) {
          start = j;
          break;
        }
        if (!reached_.contains(ids[j])) break;
      }
    }
    waypoints_ = p.waypoints;
    ids_ = std::move(ids);
    index_ = start;
    advance(here);
    reset_stall(here);
  }

  const Position& target() const { return waypoints_[index_]; }
  int stalled() const { return stalled_; }

  /// Returns true when the agent moved on to a new waypoint.
  bool update(const Position& here) {
    if (advance(here)) {
      reset_stall(here);
      return true;
    }
    const double d = distance(here, target());
    if (d < best_) {
      best_ = d;
      stalled_ = 0;
    } else {
      ++stalled_;
    }
    return false;
  }

 private:
  bool advance(const Position& here) {
    bool moved = false;
    while (index_ + 1 < waypoints_.size() && distance(here, waypoints_[index_]) <= hcfg_.waypoint_radius) {
      reached_.insert(ids_[index_]);
      ++index_;
      moved = true;
    }
    return moved;
  }
  void reset_stall(const Position& here) {
    best_ = distance(here, target());
    stalled_ = 0;
  }

  const HybridConfig& hcfg_;
  std::vector<Position> waypoints_;
  std::vector<std::int64_t> ids_;
  std::set<std::int64_t> reached_;
  std::size_t index_ = 0;
  double best_ = 0.0;
  int stalled_ = 0;
};

}  // namespace

HybridResult navigate_hybrid(const TerrainMap& map, const NavGraph& graph, LocalPolicy& policy,
                             const Position& start, const Position& goal, const HybridConfig& hcfg,
                             const SimConfig& cfg, const EpisodeOptions& options) {
  if (!is_navigable(map, start)) throw PreconditionError("episode start is not navigable");
  if (!is_navigable(map, goal)) throw PreconditionError("episode goal is not navigable");
  hcfg.validate();

  HybridResult out;
  EpisodeDriver driver(map, cfg, start, goal, options);
  if (driver.started_at_goal()) {
    out.episode = driver.finish(Termination::reached);
    return out;
  }
  const auto timed_plan = [&](const Position& from) -> std::optional<Plan> {
    if (graph.empty()) return std::nullopt;
    const auto t0 = std::chrono::steady_clock::now();
    auto p = plan(graph, from, goal);
    out.plan_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    ++out.plans;
    return p;
  };

  auto current = timed_plan(start);
  if (!current) {
    out.episode = driver.finish(Termination::no_plan);
    return out;
  }
  policy.reset();
  WaypointFollower follower(hcfg);
  follower.set_plan(*current, start);

  for (;;) {
    if (const auto t = driver.tick(policy, follower.target())) {
      out.episode = driver.finish(*t);
      return out;
    }
    const Position& here = driver.state().position;
    if (follower.update(here)) policy.reset();
    // Once the replan budget is spent the plain no-progress rule takes over.
    const bool can_replan = hcfg.replanning && out.replans < hcfg.max_replans;
    if (follower.stalled() < (can_replan ? hcfg.stall_replan_steps : cfg.reward.no_progress_limit)) continue;
    if (!can_replan) {
      out.episode = driver.finish(Termination::no_progress);
      return out;
    }
    ++out.replans;
    // A failed replan keeps the previous route.
    if (auto next = timed_plan(here)) current = std::move(next);
    const Position previous_target = follower.target();
    follower.set_plan(*current, here);
    if (!(follower.target() == previous_target)) policy.reset();
  }
}

}  // namespace gnav
