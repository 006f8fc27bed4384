#include "gnav/cli_commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnav/errors.hpp"
#include "gnav/evalharness.hpp"
#include "gnav/graphbuild.hpp"
#include "gnav/map_io.hpp"
#include "gnav/planner.hpp"
#include "gnav/run_config.hpp"

namespace gnav {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

Position parse_position(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("position '" + text + "' must be three comma-separated numbers");
    }
  }
  if (v.size() != 3) throw ConfigError("position '" + text + "' must be three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

std::string format_position(const Position& p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << p.x << ',' << p.y << ',' << p.z;
  return os.str();
}

/// Options shared by every command.
struct Common {
  std::string config_path;
  std::string out = "out";
  std::optional<int> jobs;
  bool out_given = false;

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (out_given) cfg.output_dir = out;
    if (jobs) cfg.jobs = *jobs;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Run configuration (strict JSON)");
  cmd->add_option_function<std::string>(
      "--out", [&c](const std::string& v) { c.out = v, c.out_given = true; }, "Output directory or file");
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all hardware threads)");
}

/// Resolves `--out` into (directory, file). A value with an extension names the file itself.
std::pair<fs::path, fs::path> output_target(const std::string& out, const std::string& default_name) {
  const fs::path p(out);
  if (p.has_extension()) {
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    return {dir, p};
  }
  return {p, p / default_name};
}

class Manifest {
 public:
  Manifest(std::string command, const RunConfig& cfg) : command_(std::move(command)), config_(config_to_json(cfg)) {}
  void add(const fs::path& path) { files_.push_back(path); }
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }

  void write(const fs::path& dir) const {
    json artifacts = json::array();
    for (const fs::path& f : files_) {
      char hash[17];
      std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(read_file(f))));
      artifacts.push_back({{"path", f.lexically_relative(dir).generic_string()}, {"fnv1a64", hash}});
    }
    json doc = {{"command", command_}, {"config", config_}, {"artifacts", artifacts}};
    for (const auto& [k, v] : extra_.items()) doc[k] = v;
    write_file(dir / "manifest.json", doc.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_;
  json extra_ = json::object();
  std::vector<fs::path> files_;
};

std::string map_summary(const TerrainMap& map) {
  std::size_t water = 0;
  std::size_t lava = 0;
  for (const CellKind k : map.kinds()) {
    water += k == CellKind::water;
    lava += k == CellKind::lava;
  }
  std::size_t roofs = 0;
  for (const Box& b : map.boxes()) roofs += b.walkable_roof;
  const double cells = static_cast<double>(map.kinds().size());
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "extent: " << map.config().extent_x << " x " << map.config().extent_z << " m (cell " << map.config().cell_size
     << " m)\n"
     << "terrain height: " << map.min_terrain() << " .. " << map.max_terrain() << " m\n"
     << "navigable fraction: " << static_cast<double>(map.navigable_slots().size()) / cells << '\n'
     << "boxes: " << map.boxes().size() << " (" << roofs << " walkable roofs)\n"
     << "jump pads: " << map.jump_pads().size() << '\n'
     << "hazard cells: " << water << " water, " << lava << " lava\n";
  return os.str();
}

// --------------------------------------------------------------------------- gen-map

struct GenMapArgs {
  Common common;
  std::optional<std::uint64_t> seed;
  std::optional<double> size;
  std::optional<double> cell_size;
};

int cmd_gen_map(const GenMapArgs& a) {
  RunConfig cfg = a.common.load();
  if (a.seed) cfg.world.seed = *a.seed;
  if (a.size) cfg.world.extent_x = cfg.world.extent_z = *a.size;
  if (a.cell_size) cfg.world.cell_size = *a.cell_size;
  cfg.validate();
  const TerrainMap map = generate_map(cfg.world);
  const auto [dir, file] = output_target(cfg.output_dir, "map.bin");
  ensure_dir(dir);
  save_map(map, file);
  Manifest manifest("gen-map", cfg);
  manifest.add(file);
  manifest.write(dir);
  std::cout << "wrote " << file.string() << '\n' << map_summary(map);
  return 0;
}

// --------------------------------------------------------------------------- build-graph

struct BuildArgs {
  Common common;
  std::string map;
  std::optional<std::string> method;
  std::optional<int> nodes;
  std::optional<int> k;
  std::optional<int> repeats;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
};

void apply_build_overrides(RunConfig& cfg, const BuildArgs& a) {
  if (a.method) cfg.build.method = parse_placement_method(*a.method);
  if (a.nodes) cfg.build.n = *a.nodes;
  if (a.k) cfg.build.k = *a.k;
  if (a.repeats) cfg.build.repeats = *a.repeats;
  if (a.threshold) cfg.build.success_threshold = *a.threshold;
  if (a.seed) cfg.build.seed = *a.seed;
}

int cmd_build_graph(const BuildArgs& a) {
  RunConfig cfg = a.common.load();
  apply_build_overrides(cfg, a);
  cfg.validate();
  const TerrainMap map = load_map(a.map);
  const NavGraph graph = build_graph(map, cfg.build, cfg.policy, cfg.sim, cfg.jobs);
  const auto [dir, file] = output_target(cfg.output_dir, "graph.json");
  ensure_dir(dir);
  save_graph(graph, file);
  Manifest manifest("build-graph", cfg);
  manifest.set("map", a.map);
  manifest.add(file);
  manifest.write(dir);
  const BuildMeta& m = graph.meta();
  std::cout << "wrote " << file.string() << '\n'
            << "method: " << to_string(m.method) << ", n=" << m.n_requested << ", k=" << m.k_effective
            << ", repeats=" << m.repeats << ", threshold=" << m.success_threshold << '\n'
            << "vertices: " << graph.vertex_count() << ", edges: " << graph.edges().size()
            << ", components: " << weakly_connected_components(graph) << '\n'
            << "probe episodes: " << m.probe_episodes << " of " << m.candidate_edges << " candidates\n"
            << "build time: " << std::fixed << std::setprecision(2) << m.build_wall_time_s << " s\n";
  return 0;
}

// --------------------------------------------------------------------------- plan

struct PlanArgs {
  std::string graph;
  std::string from;
  std::string to;
};

int cmd_plan(const PlanArgs& a) {
  const Position from = parse_position(a.from);
  const Position to = parse_position(a.to);
  const NavGraph graph = load_graph(a.graph);
  const auto p = plan(graph, from, to);
  if (!p) {
    std::cout << "no path: vertex " << nearest_vertex(graph, from) << " cannot reach vertex "
              << nearest_vertex(graph, to) << '\n';
    return 0;
  }
  std::cout << "cost: " << p->total_cost << " steps\n";
  for (std::size_t i = 0; i < p->waypoints.size(); ++i) {
    std::cout << "  " << i << ": ";
    if (i < p->vertex_path.size()) {
      std::cout << "vertex " << p->vertex_path[i] << " at ";
    } else {
      std::cout << "goal at ";
    }
    std::cout << format_position(p->waypoints[i]) << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------------- evaluate

struct EvaluateArgs {
  Common common;
  BuildArgs build;
  std::string map;
  std::optional<std::string> graph;
  std::optional<std::string> goal_file;
  std::optional<int> goals;
  std::optional<int> seeds;
  std::optional<std::string> methods;
  std::optional<std::uint64_t> goal_seed;
  bool no_replan = false;
  bool full = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

int cmd_evaluate(const EvaluateArgs& a) {
  RunConfig cfg = a.common.load();
  apply_build_overrides(cfg, a.build);
  if (a.goals) cfg.eval.goals = *a.goals;
  if (a.seeds) cfg.eval.seeds = *a.seeds;
  if (a.methods) cfg.eval.methods = split_list(*a.methods);
  if (a.goal_seed) cfg.eval.goal_seed = *a.goal_seed;
  if (a.no_replan) cfg.hybrid.replanning = false;
  cfg.validate();

  const TerrainMap map = load_map(a.map);
  const fs::path dir(cfg.output_dir);
  ensure_dir(dir);
  Manifest manifest("evaluate", cfg);
  manifest.set("map", a.map);

  GoalSet goals;
  if (a.goal_file) {
    goals = load_goals(*a.goal_file);
  } else {
    const int count = a.full ? cfg.eval.full_goals : cfg.eval.goals;
    goals = sample_goals(map, count, cfg.eval.bins, cfg.eval.goal_seed, cfg.sim.reward.success_radius);
  }
  save_goals(goals, dir / "goals.json");
  manifest.add(dir / "goals.json");

  std::optional<NavGraph> graph;
  const bool wants_hybrid = std::find(cfg.eval.methods.begin(), cfg.eval.methods.end(), "hybrid") != cfg.eval.methods.end();
  if (wants_hybrid) {
    if (a.graph) {
      graph = load_graph(*a.graph);
      manifest.set("graph", *a.graph);
    } else {
      graph = build_graph(map, cfg.build, cfg.policy, cfg.sim, cfg.jobs);
      save_graph(*graph, dir / "graph.json");
      manifest.add(dir / "graph.json");
    }
  }

  const std::string config_echo = config_to_json(cfg).dump();
  const auto seeds = cfg.eval.episode_seeds();
  std::vector<EvalReport> reports;
  for (const std::string& name : cfg.eval.methods) {
    MethodSpec spec;
    spec.label = name;
    if (name == "hybrid") {
      spec.kind = MethodKind::hybrid;
      spec.graph = &*graph;
      spec.hybrid = cfg.hybrid;
    }
    EvalReport report = evaluate_method(map, goals, spec, cfg.policy, cfg.eval.episode_sim(cfg.sim), seeds, cfg.jobs);
    const fs::path json_path = dir / ("report_" + name + ".json");
    const fs::path csv_path = dir / ("report_" + name + ".csv");
    write_file(json_path, report_to_json(report, goals, config_echo));
    write_file(csv_path, report_to_csv(report, goals));
    manifest.add(json_path);
    manifest.add(csv_path);
    reports.push_back(std::move(report));
  }
  const std::string table = summary_table(reports);
  write_file(dir / "summary.txt", table);
  manifest.add(dir / "summary.txt");
  manifest.write(dir);
  std::cout << goals.pairs.size() << " goals, " << seeds.size() << " seed(s)\n" << table;
  return 0;
}

// --------------------------------------------------------------------------- sweep

struct SweepArgs {
  Common common;
  std::vector<std::string> maps;
  std::optional<int> map_count;
  std::optional<std::string> nodes;
  std::optional<std::string> k;
  std::optional<std::string> seeds;
  std::optional<int> goals;
};

template <class T>
std::vector<T> parse_numbers(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const std::string& part : split_list(s)) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + part + "' is not an integer");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + " must not be empty");
  return out;
}

int cmd_sweep(const SweepArgs& a) {
  RunConfig cfg = a.common.load();
  if (a.nodes) cfg.sweep.node_counts = parse_numbers<int>(*a.nodes, "--nodes");
  if (a.k) cfg.sweep.k_values = parse_numbers<int>(*a.k, "--k");
  if (a.seeds) cfg.sweep.seeds = parse_numbers<std::uint64_t>(*a.seeds, "--seeds");
  if (a.goals) cfg.eval.goals = *a.goals;
  cfg.validate();

  std::vector<std::pair<std::string, TerrainMap>> maps;
  for (const std::string& path : a.maps) maps.emplace_back(fs::path(path).stem().string(), load_map(path));
  if (maps.empty()) {
    const int count = a.map_count.value_or(1);
    if (count < 1) throw ConfigError("--maps must be at least 1");
    for (int i = 0; i < count; ++i) {
      WorldConfig w = cfg.world;
      w.seed = cfg.world.seed + static_cast<std::uint64_t>(i);
      maps.emplace_back("map" + std::to_string(w.seed), generate_map(w));
    }
  }
  std::vector<GoalSet> goal_sets;
  goal_sets.reserve(maps.size());
  for (const auto& [name, map] : maps)
    goal_sets.push_back(sample_goals(map, cfg.eval.goals, cfg.eval.bins, cfg.eval.goal_seed, cfg.sim.reward.success_radius));
  std::vector<SweepMap> sweep_maps;
  for (std::size_t i = 0; i < maps.size(); ++i) sweep_maps.push_back({maps[i].first, &maps[i].second, &goal_sets[i]});

  SweepConfig sc;
  sc.node_counts = cfg.sweep.node_counts;
  sc.k_values = cfg.sweep.k_values;
  sc.seeds = cfg.sweep.seeds;
  sc.build = cfg.build;
  sc.hybrid = cfg.hybrid;
  sc.query_count = cfg.sweep.query_count;
  sc.jobs = cfg.jobs;

  const fs::path dir(cfg.output_dir);
  ensure_dir(dir);
  const auto cells = sweep(sweep_maps, sc, cfg.policy, cfg.eval.episode_sim(cfg.sim), dir / "cells");
  write_file(dir / "sweep.csv", sweep_to_csv(cells));
  Manifest manifest("sweep", cfg);
  manifest.add(dir / "sweep.csv");
  manifest.write(dir);
  std::size_t resumed = 0;
  for (const SweepCell& c : cells) resumed += c.resumed;
  std::cout << cells.size() << " cells (" << resumed << " resumed)\n"
            << std::left << std::setw(10) << "map" << std::setw(6) << "n" << std::setw(5) << "k" << std::setw(8)
            << "seed" << std::setw(9) << "all" << std::setw(9) << "hard" << std::setw(10) << "build_s" << "query_ms\n";
  for (const SweepCell& c : cells) {
    std::cout << std::setw(10) << c.map << std::setw(6) << c.n << std::setw(5) << c.k << std::setw(8) << c.seed
              << std::fixed << std::setprecision(3) << std::setw(9) << c.overall_rate << std::setw(9) << c.bin_rates[2]
              << std::setprecision(2) << std::setw(10) << c.build_s << std::setprecision(4) << c.query_ms << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------------- bench-query

struct BenchArgs {
  std::string graph;
  int queries = 10000;
  std::uint64_t seed = 1;
};

int cmd_bench_query(const BenchArgs& a) {
  if (a.queries < 1) throw ConfigError("--queries must be positive");
  const NavGraph graph = load_graph(a.graph);
  const TimingStats t = timing_probe(graph, a.queries, a.seed);
  std::cout << std::fixed << std::setprecision(4) << "vertices: " << graph.vertex_count()
            << ", edges: " << graph.edges().size() << '\n'
            << "queries: " << a.queries << ", mean: " << t.mean_ms << " ms, p95: " << t.p95_ms << " ms\n";
  return 0;
}

// --------------------------------------------------------------------------- episode

struct EpisodeArgs {
  Common common;
  std::string map;
  std::string from;
  std::string to;
  std::optional<double> heading_deg;
  std::optional<std::string> trajectory;
};

int cmd_episode(const EpisodeArgs& a) {
  RunConfig cfg = a.common.load();
  cfg.validate();
  const TerrainMap map = load_map(a.map);
  const Position from = parse_position(a.from);
  const Position to = parse_position(a.to);
  if (!is_navigable(map, from)) throw ConfigError("--from " + a.from + " is not a navigable position");
  if (!is_navigable(map, to)) throw ConfigError("--to " + a.to + " is not a navigable position");
  std::vector<TrajectoryTick> ticks;
  EpisodeOptions options;
  if (a.heading_deg) options.initial_heading = deg_to_rad(*a.heading_deg);
  if (a.trajectory) options.trajectory = &ticks;
  const auto policy = make_policy(cfg.policy);
  const EpisodeResult r = run_episode(map, from, to, *policy, cfg.sim, options);
  if (a.trajectory) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const TrajectoryTick& t : ticks) {
      const json line = {{"tick", t.tick},
                         {"position", {t.position.x, t.position.y, t.position.z}},
                         {"action", {t.action.forward, t.action.strafe, t.action.turn, t.action.jump}},
                         {"reward", t.reward}};
      os << line.dump() << '\n';
    }
    write_file(*a.trajectory, os.str());
  }
  std::cout << std::setprecision(6) << "success: " << (r.success ? "true" : "false")
            << "\ntermination: " << to_string(r.termination) << "\nsteps: " << r.steps
            << "\ntotal_reward: " << r.total_reward << " (sparse " << r.breakdown.sparse << ", dense "
            << r.breakdown.dense << ", penalty " << r.breakdown.penalty << ")\nfinal_position: "
            << format_position(r.final_position) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Procedural worlds, way-point graphs and hybrid navigation"};
  app.require_subcommand(1);

  GenMapArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-map", "Generate a map file");
  add_common(gen_cmd, gen.common);
  gen_cmd->add_option("--seed", gen.seed, "World seed");
  gen_cmd->add_option("--size", gen.size, "Square extent in meters");
  gen_cmd->add_option("--cell-size", gen.cell_size, "Heightfield cell size in meters");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-graph", "Build a way-point graph for a map");
  add_common(build_cmd, build.common);
  build_cmd->add_option("--map", build.map, "Map file")->required();
  const auto add_build_options = [](CLI::App* cmd, BuildArgs& b) {
    cmd->add_option("--method", b.method, "unconstrained | constrained");
    cmd->add_option("--nodes", b.nodes, "Vertex count");
    cmd->add_option("--k", b.k, "Nearest-neighbor candidates per vertex");
    cmd->add_option("--repeats", b.repeats, "Probe episodes per candidate edge");
    cmd->add_option("--threshold", b.threshold, "Required probe success ratio");
    cmd->add_option("--seed", b.seed, "Build seed");
  };
  add_build_options(build_cmd, build);

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a route over a graph");
  plan_cmd->add_option("--graph", plan_args.graph, "Graph file")->required();
  plan_cmd->add_option("--from", plan_args.from, "Start x,y,z")->required();
  plan_cmd->add_option("--to", plan_args.to, "Goal x,y,z")->required();

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate navigation methods on sampled goals");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--map", eval.map, "Map file")->required();
  eval_cmd->add_option("--graph", eval.graph, "Graph file (built from the config when omitted)");
  eval_cmd->add_option("--goal-file", eval.goal_file, "Goal set file (sampled when omitted)");
  eval_cmd->add_option("--goals", eval.goals, "Goal pairs to sample");
  eval_cmd->add_option("--seeds", eval.seeds, "Episode seed replicates");
  eval_cmd->add_option("--methods", eval.methods, "Comma-separated: direct,hybrid");
  eval_cmd->add_option("--goal-seed", eval.goal_seed, "Goal sampling seed");
  eval_cmd->add_flag("--no-replan", eval.no_replan, "Disable re-planning in the hybrid executor");
  eval_cmd->add_flag("--full", eval.full, "Use the full goal count");
  add_build_options(eval_cmd, eval.build);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep graph size and neighbor count");
  add_common(sweep_cmd, sw.common);
  sweep_cmd->add_option("--map", sw.maps, "Map file (repeatable)");
  sweep_cmd->add_option("--maps", sw.map_count, "Generate this many maps when no --map is given");
  sweep_cmd->add_option("--nodes", sw.nodes, "Comma-separated vertex counts");
  sweep_cmd->add_option("--k", sw.k, "Comma-separated neighbor counts");
  sweep_cmd->add_option("--seeds", sw.seeds, "Comma-separated replicate seeds");
  sweep_cmd->add_option("--goals", sw.goals, "Goal pairs per map");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-query", "Time shortest-path queries");
  bench_cmd->add_option("--graph", bench.graph, "Graph file")->required();
  bench_cmd->add_option("--queries", bench.queries, "Query count");
  bench_cmd->add_option("--seed", bench.seed, "Query sampling seed");

  EpisodeArgs ep;
  auto* ep_cmd = app.add_subcommand("episode", "Run one point-goal episode with the local policy");
  add_common(ep_cmd, ep.common);
  ep_cmd->add_option("--map", ep.map, "Map file")->required();
  ep_cmd->add_option("--from", ep.from, "Start x,y,z")->required();
  ep_cmd->add_option("--to", ep.to, "Goal x,y,z")->required();
  ep_cmd->add_option("--heading", ep.heading_deg, "Initial heading in degrees (default: face the goal)");
  ep_cmd->add_option("--trajectory", ep.trajectory, "Write a JSON-lines trajectory here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return cmd_gen_map(gen);
    if (*build_cmd) return cmd_build_graph(build);
    if (*plan_cmd) return cmd_plan(plan_args);
    if (*eval_cmd) return cmd_evaluate(eval);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*bench_cmd) return cmd_bench_query(bench);
    if (*ep_cmd) return cmd_episode(ep);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}

}  // namespace gnav
