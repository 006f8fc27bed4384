#include "gnav/evalharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gnav/errors.hpp"
#include "gnav/parallel.hpp"
#include "gnav/run_config.hpp"

namespace gnav {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGoalTag = 0x676f616cULL;      // "goal"
constexpr std::uint64_t kHeadingTag = 0x68656164ULL;   // "head"
constexpr std::uint64_t kTimingTag = 0x74696d65ULL;    // "time"
constexpr std::size_t kGoalDrawsPerPair = 20000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json position_json(const Position& p) { return json::array({p.x, p.y, p.z}); }

Position position_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("position must be an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

double percentile95(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(xs.size()))) - 1;
  return xs[std::min(idx, xs.size() - 1)];
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(GoalBin b) {
  switch (b) {
    case GoalBin::easy: return "easy";
    case GoalBin::medium: return "medium";
    case GoalBin::hard: return "hard";
  }
  return "unknown";
}

GoalBin parse_goal_bin(std::string_view s) {
  if (s == "easy") return GoalBin::easy;
  if (s == "medium") return GoalBin::medium;
  if (s == "hard") return GoalBin::hard;
  throw IoError("unknown goal bin '" + std::string(s) + "'");
}

GoalBin BinThresholds::classify(double dist) const {
  if (dist < medium) return GoalBin::easy;
  if (dist < hard) return GoalBin::medium;
  return GoalBin::hard;
}

void BinThresholds::validate() const {
  if (!(medium > 0.0)) throw ConfigError("eval.bin_thresholds.medium must be positive");
  if (!(hard > medium)) throw ConfigError("eval.bin_thresholds.hard must exceed medium");
}

GoalSet sample_goals(const TerrainMap& map, int count, const BinThresholds& thresholds, std::uint64_t seed,
                     double min_separation) {
  if (count < 1) throw ConfigError("goal count must be at least 1");
  thresholds.validate();
  const double diagonal = std::hypot(map.config().extent_x, map.config().extent_z, map.max_terrain() - map.min_terrain());
  if (diagonal < thresholds.hard) throw GenerationError("degenerate map: too small for hard-bin goal pairs");

  GoalSet out;
  out.seed = seed;
  out.thresholds = thresholds;
  // Sets too small to hold every bin are not stratified.
  const auto quota = std::min(static_cast<int>(std::ceil(kMinBinShare * count - 1e-9)), count / static_cast<int>(kBinCount));
  std::array<int, kBinCount> have{};
  RngStream rng(derive_seed(seed, {kGoalTag}));
  const std::size_t max_draws = kGoalDrawsPerPair * static_cast<std::size_t>(count);
  std::size_t draws = 0;
  while (out.pairs.size() < static_cast<std::size_t>(count)) {
    if (++draws > max_draws) throw GenerationError("degenerate map: cannot fill every goal bin");
    GoalPair p;
    p.start = sample_navigable(map, rng);
    p.goal = sample_navigable(map, rng);
    p.distance = distance(p.start, p.goal);
    if (p.distance <= min_separation) continue;
    p.bin = thresholds.classify(p.distance);
    const auto b = static_cast<std::size_t>(p.bin);
    int missing_elsewhere = 0;
    for (std::size_t o = 0; o < kBinCount; ++o)
      if (o != b) missing_elsewhere += std::max(0, quota - have[o]);
    const int free_after = count - static_cast<int>(out.pairs.size()) - 1;
    if (free_after < missing_elsewhere) continue;
    ++have[b];
    out.pairs.push_back(p);
  }
  return out;
}

std::string goals_to_json(const GoalSet& goals) {
  json pairs = json::array();
  for (const GoalPair& p : goals.pairs) {
    pairs.push_back({{"start", position_json(p.start)},
                     {"goal", position_json(p.goal)},
                     {"distance", p.distance},
                     {"bin", std::string(to_string(p.bin))}});
  }
  const json doc = {{"seed", goals.seed},
                    {"thresholds", {{"medium", goals.thresholds.medium}, {"hard", goals.thresholds.hard}}},
                    {"pairs", pairs}};
  return doc.dump(2) + "\n";
}

GoalSet goals_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("goal file is not valid JSON: ") + e.what());
  }
  try {
    GoalSet g;
    g.seed = doc.at("seed").get<std::uint64_t>();
    g.thresholds.medium = doc.at("thresholds").at("medium").get<double>();
    g.thresholds.hard = doc.at("thresholds").at("hard").get<double>();
    for (const json& jp : doc.at("pairs")) {
      GoalPair p;
      p.start = position_from(jp.at("start"));
      p.goal = position_from(jp.at("goal"));
      p.distance = jp.at("distance").get<double>();
      p.bin = parse_goal_bin(jp.at("bin").get<std::string>());
      g.pairs.push_back(p);
    }
    return g;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed goal file: ") + e.what());
  }
}

void save_goals(const GoalSet& goals, const std::filesystem::path& path) { write_text(path, goals_to_json(goals)); }

GoalSet load_goals(const std::filesystem::path& path) {
  GoalSet g = goals_from_json(read_text(path));
  if (g.pairs.empty()) throw ConfigError("goal file " + path.string() + " contains no goal pairs");
  return g;
}

double episode_heading(std::uint64_t episode_seed, std::size_t goal_index) {
  RngStream rng(derive_seed(episode_seed, {kHeadingTag, goal_index}));
  return rng.uniform(-kPi, kPi);
}

SeedRun run_goal_set(const TerrainMap& map, const GoalSet& goals, const MethodSpec& method, const PolicySpec& policy,
                     const SimConfig& sim, std::uint64_t episode_seed, int jobs) {
  if (method.kind == MethodKind::hybrid && method.graph == nullptr)
    throw PreconditionError("hybrid evaluation needs a graph");
  const auto t0 = Clock::now();
  SeedRun run;
  run.episode_seed = episode_seed;
  run.records.resize(goals.pairs.size());
  parallel_for(goals.pairs.size(), jobs, [&](std::size_t i) {
    const GoalPair& pair = goals.pairs[i];
    const auto controller = make_policy(policy);
    EpisodeOptions options;
    options.initial_heading = episode_heading(episode_seed, i);
    EpisodeRecord& rec = run.records[i];
    rec.goal_index = i;
    if (method.kind == MethodKind::direct) {
      const EpisodeResult r = run_episode(map, pair.start, pair.goal, *controller, sim, options);
      rec.success = r.success;
      rec.steps = r.steps;
      rec.termination = r.termination;
    } else {
      const HybridResult r =
          navigate_hybrid(map, *method.graph, *controller, pair.start, pair.goal, method.hybrid, sim, options);
      rec.success = r.episode.success;
      rec.steps = r.episode.steps;
      rec.termination = r.episode.termination;
      rec.replans = r.replans;
      rec.plan_ms = r.plan_ms;
    }
  });
  for (const EpisodeRecord& rec : run.records) {
    BinStats& b = run.bins[static_cast<std::size_t>(goals.pairs[rec.goal_index].bin)];
    ++b.attempts;
    ++run.overall.attempts;
    if (rec.success) {
      ++b.successes;
      ++run.overall.successes;
    }
  }
  run.eval_wall_time_s = seconds_since(t0);
  return run;
}

EvalReport evaluate_method(const TerrainMap& map, const GoalSet& goals, const MethodSpec& method,
                           const PolicySpec& policy, const SimConfig& sim, std::span<const std::uint64_t> episode_seeds,
                           int jobs) {
  EvalReport report;
  report.method = method.label;
  if (method.kind == MethodKind::hybrid && method.graph) report.build_wall_time_s = method.graph->meta().build_wall_time_s;
  std::array<std::vector<double>, kBinCount> bin_rates;
  std::vector<double> overall;
  std::vector<double> plan_ms;
  for (const std::uint64_t seed : episode_seeds) {
    SeedRun run = run_goal_set(map, goals, method, policy, sim, seed, jobs);
    for (std::size_t b = 0; b < kBinCount; ++b) bin_rates[b].push_back(run.bins[b].rate());
    overall.push_back(run.overall.rate());
    report.eval_wall_time_s += run.eval_wall_time_s;
    if (method.kind == MethodKind::hybrid)
      for (const EpisodeRecord& r : run.records) plan_ms.push_back(r.plan_ms);
    report.runs.push_back(std::move(run));
  }
  for (std::size_t b = 0; b < kBinCount; ++b) report.bin_rates[b] = mean_std(bin_rates[b]);
  report.overall_rate = mean_std(overall);
  if (!plan_ms.empty()) {
    report.plan_ms_mean = std::accumulate(plan_ms.begin(), plan_ms.end(), 0.0) / static_cast<double>(plan_ms.size());
    report.plan_ms_p95 = percentile95(plan_ms);
  }
  return report;
}

std::string report_to_json(const EvalReport& report, const GoalSet& goals, const std::string& config_json) {
  const auto stats_json = [](const BinStats& s) {
    return json{{"attempts", s.attempts}, {"successes", s.successes}, {"rate", s.rate()}};
  };
  const auto ms_json = [](const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  json runs = json::array();
  for (const SeedRun& run : report.runs) {
    json bins = json::object();
    for (std::size_t b = 0; b < kBinCount; ++b) bins[std::string(to_string(static_cast<GoalBin>(b)))] = stats_json(run.bins[b]);
    runs.push_back({{"episode_seed", run.episode_seed}, {"bins", bins}, {"overall", stats_json(run.overall)}});
  }
  json rates = json::object();
  for (std::size_t b = 0; b < kBinCount; ++b) rates[std::string(to_string(static_cast<GoalBin>(b)))] = ms_json(report.bin_rates[b]);
  rates["all"] = ms_json(report.overall_rate);
  json config = config_json.empty() ? json::object() : json::parse(config_json);
  const json doc = {
      {"method", report.method},
      {"goal_seed", goals.seed},
      {"goal_count", goals.pairs.size()},
      {"success_rate", rates},
      {"runs", runs},
      {"config", config},
      {"timing",
       {{"build_wall_time_s", report.build_wall_time_s},
        {"eval_wall_time_s", report.eval_wall_time_s},
        {"plan_ms_mean", report.plan_ms_mean},
        {"plan_ms_p95", report.plan_ms_p95}}},
  };
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report, const GoalSet& goals) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "seed,goal,start_x,start_y,start_z,goal_x,goal_y,goal_z,distance,bin,method,success,steps,replans,plan_ms\n";
  for (const SeedRun& run : report.runs) {
    for (const EpisodeRecord& r : run.records) {
      const GoalPair& p = goals.pairs[r.goal_index];
      os << run.episode_seed << ',' << r.goal_index << ',' << p.start.x << ',' << p.start.y << ',' << p.start.z << ','
         << p.goal.x << ',' << p.goal.y << ',' << p.goal.z << ',' << p.distance << ',' << to_string(p.bin) << ','
         << report.method << ',' << (r.success ? 1 : 0) << ',' << r.steps << ',' << r.replans << ',' << r.plan_ms
         << '\n';
    }
  }
  return os.str();
}

std::string summary_table(std::span<const EvalReport> reports) {
  std::size_t width = 6;
  for (const EvalReport& r : reports) width = std::max(width, r.method.size());
  const auto cell = [](const MeanStd& m) { return fixed(m.mean, 3) + " ± " + fixed(m.std, 3); };
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "method";
  for (const char* h : {"All", "Easy", "Medium", "Hard"}) os << "  " << std::setw(15) << h;
  os << '\n';
  for (const EvalReport& r : reports) {
    os << std::setw(static_cast<int>(width)) << r.method << "  " << std::setw(16) << cell(r.overall_rate);
    for (std::size_t b = 0; b < kBinCount; ++b) os << "  " << std::setw(16) << cell(r.bin_rates[b]);
    os << '\n';
  }
  return os.str();
}

TimingStats timing_probe(const NavGraph& graph, int query_count, std::uint64_t seed) {
  if (graph.empty()) throw PlanningError("cannot time queries on an empty graph");
  Position lo = graph.vertex(0);
  Position hi = lo;
  for (const Position& p : graph.vertices()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  RngStream rng(derive_seed(seed, {kTimingTag}));
  const auto draw = [&] { return Position{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)}; };

  // Warm-up pass so the first timed queries do not pay for cold caches.
  for (int i = 0; i < std::min(query_count, 100); ++i) (void)shortest_path(graph, nearest_vertex(graph, draw()), nearest_vertex(graph, draw()));

  TimingStats stats;
  stats.per_query_ms.reserve(static_cast<std::size_t>(std::max(query_count, 0)));
  for (int i = 0; i < query_count; ++i) {
    const Position a = draw();
    const Position b = draw();
    const auto t0 = Clock::now();
    (void)shortest_path(graph, nearest_vertex(graph, a), nearest_vertex(graph, b));
    stats.per_query_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  if (!stats.per_query_ms.empty()) {
    stats.mean_ms = std::accumulate(stats.per_query_ms.begin(), stats.per_query_ms.end(), 0.0) /
                    static_cast<double>(stats.per_query_ms.size());
    stats.p95_ms = percentile95(stats.per_query_ms);
  }
  return stats;
}

void SweepConfig::validate() const {
  if (node_counts.empty()) throw ConfigError("sweep.node_counts must not be empty");
  if (k_values.empty()) throw ConfigError("sweep.k_values must not be empty");
  if (seeds.empty()) throw ConfigError("sweep.seeds must not be empty");
  for (int n : node_counts)
    if (n < 1) throw ConfigError("sweep.node_counts entries must be at least 1");
  for (int k : k_values)
    if (k < 1) throw ConfigError("sweep.k_values entries must be at least 1");
  if (query_count < 1) throw ConfigError("sweep.query_count must be positive");
  hybrid.validate();
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string sweep_cell_key(const SweepMap& map, int n, int k, std::uint64_t seed, const SweepConfig& cfg,
                           const PolicySpec& policy, const SimConfig& sim) {
  BuildConfig build = cfg.build;
  build.n = n;
  build.k = k;
  build.seed = seed;
  const json doc = {{"world", config_to_json(map.map->config())},
                    {"goals", json::parse(goals_to_json(*map.goals))},
                    {"build", config_to_json(build)},
                    {"hybrid", config_to_json(cfg.hybrid)},
                    {"policy", config_to_json(policy)},
                    {"sim", config_to_json(sim)},
                    {"query_count", cfg.query_count}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

namespace {

json cell_to_json(const SweepCell& c) {
  return {{"map", c.map},
          {"n", c.n},
          {"k", c.k},
          {"seed", c.seed},
          {"bin_rates", c.bin_rates},
          {"overall_rate", c.overall_rate},
          {"edges", c.edges},
          {"probe_episodes", c.probe_episodes},
          {"build_s", c.build_s},
          {"eval_s", c.eval_s},
          {"query_ms", c.query_ms}};
}

SweepCell cell_from_json(const json& j) {
  SweepCell c;
  c.map = j.at("map").get<std::string>();
  c.n = j.at("n").get<int>();
  c.k = j.at("k").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.bin_rates = j.at("bin_rates").get<std::array<double, kBinCount>>();
  c.overall_rate = j.at("overall_rate").get<double>();
  c.edges = j.at("edges").get<std::size_t>();
  c.probe_episodes = j.at("probe_episodes").get<std::size_t>();
  c.build_s = j.at("build_s").get<double>();
  c.eval_s = j.at("eval_s").get<double>();
  c.query_ms = j.at("query_ms").get<double>();
  return c;
}

}  // namespace

std::vector<SweepCell> sweep(std::span<const SweepMap> maps, const SweepConfig& cfg, const PolicySpec& policy,
                             const SimConfig& sim, const std::optional<std::filesystem::path>& cell_dir) {
  cfg.validate();
  if (maps.empty()) throw ConfigError("sweep needs at least one map");
  if (cell_dir) std::filesystem::create_directories(*cell_dir);
  std::vector<SweepCell> cells;
  for (const SweepMap& m : maps) {
    for (const int n : cfg.node_counts) {
      for (const int k : cfg.k_values) {
        for (const std::uint64_t seed : cfg.seeds) {
          const std::string key = sweep_cell_key(m, n, k, seed, cfg, policy, sim);
          const auto path = cell_dir ? std::optional(*cell_dir / (key + ".json")) : std::nullopt;
          if (path && std::filesystem::exists(*path)) {
            try {
              SweepCell c = cell_from_json(json::parse(read_text(*path)));
              c.resumed = true;
              cells.push_back(std::move(c));
              continue;
            } catch (const json::exception&) {
              // Unreadable cell files are recomputed.
            }
          }
          BuildConfig build = cfg.build;
          build.n = n;
          build.k = k;
          build.seed = seed;
          const NavGraph graph = build_graph(*m.map, build, policy, sim, cfg.jobs);
          MethodSpec method{MethodKind::hybrid, "hybrid", &graph, cfg.hybrid};
          const SeedRun run = run_goal_set(*m.map, *m.goals, method, policy, sim, seed, cfg.jobs);
          SweepCell c;
          c.map = m.name;
          c.n = n;
          c.k = k;
          c.seed = seed;
          for (std::size_t b = 0; b < kBinCount; ++b) c.bin_rates[b] = run.bins[b].rate();
          c.overall_rate = run.overall.rate();
          c.edges = graph.edges().size();
          c.probe_episodes = graph.meta().probe_episodes;
          c.build_s = graph.meta().build_wall_time_s;
          c.eval_s = run.eval_wall_time_s;
          c.query_ms = timing_probe(graph, cfg.query_count, seed).mean_ms;
          if (path) write_text(*path, cell_to_json(c).dump(2) + "\n");
          cells.push_back(std::move(c));
        }
      }
    }
  }
  return cells;
}

std::string sweep_to_csv(std::span<const SweepCell> cells) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n,k,seed,map,bin,success_rate,build_s,eval_s,query_ms\n";
  for (const SweepCell& c : cells) {
    const auto row = [&](std::string_view bin, double rate) {
      os << c.n << ',' << c.k << ',' << c.seed << ',' << c.map << ',' << bin << ',' << rate << ',' << c.build_s << ','
         << c.eval_s << ',' << c.query_ms << '\n';
    };
    row("all", c.overall_rate);
    for (std::size_t b = 0; b < kBinCount; ++b) row(to_string(static_cast<GoalBin>(b)), c.bin_rates[b]);
  }
  return os.str();
}

}  // namespace gnav
