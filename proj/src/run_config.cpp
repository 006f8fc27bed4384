#include "gnav/run_config.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "gnav/errors.hpp"

namespace gnav {

using nlohmann::json;

void EvalConfig::validate() const {
  if (goals < 1) throw ConfigError("eval.goals must be at least 1");
  if (full_goals < 1) throw ConfigError("eval.full_goals must be at least 1");
  if (seeds < 1) throw ConfigError("eval.seeds must be at least 1");
  if (max_episode_steps < 1) throw ConfigError("eval.max_episode_steps must be positive");
  bins.validate();
  if (methods.empty()) throw ConfigError("eval.methods must not be empty");
  for (const std::string& m : methods)
    if (m != "direct" && m != "hybrid") throw ConfigError("eval.methods: unknown method '" + m + "'");
}

std::vector<std::uint64_t> EvalConfig::episode_seeds() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < seeds; ++i) out.push_back(episode_seed + static_cast<std::uint64_t>(i));
  return out;
}

SimConfig EvalConfig::episode_sim(const SimConfig& sim) const {
  SimConfig out = sim;
  out.reward.max_episode_steps = max_episode_steps;
  return out;
}

void RunConfig::validate() const {
  world.validate();
  sim.validate();
  policy.validate();
  build.validate();
  hybrid.validate();
  eval.validate();
  if (sweep.node_counts.empty() || sweep.k_values.empty() || sweep.seeds.empty())
    throw ConfigError("sweep grids must not be empty");
  if (sweep.query_count < 1) throw ConfigError("sweep.query_count must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (jobs < 0) throw ConfigError("jobs must be non-negative");
}

json config_to_json(const WorldConfig& c) {
  return {{"seed", c.seed},
          {"extent_x", c.extent_x},
          {"extent_z", c.extent_z},
          {"height_scale", c.height_scale},
          {"cell_size", c.cell_size},
          {"noise_octaves", c.noise_octaves},
          {"features",
           {{"buildings", c.features.buildings}, {"plateaus", c.features.plateaus}, {"jump_pads", c.features.jump_pads}}},
          {"hazard_fraction", c.hazard_fraction}};
}

json config_to_json(const SimConfig& c) {
  const PhysicsConfig& p = c.physics;
  const SensorConfig& s = c.sensor;
  const RewardConfig& r = c.reward;
  return {{"physics",
           {{"dt", p.dt},
            {"max_ground_speed", p.max_ground_speed},
            {"ground_accel", p.ground_accel},
            {"air_accel", p.air_accel},
            {"jump_velocity", p.jump_velocity},
            {"gravity", p.gravity},
            {"turn_rate", p.turn_rate},
            {"agent_radius", p.agent_radius},
            {"agent_height", p.agent_height},
            {"eye_height", p.eye_height},
            {"step_height", p.step_height},
            {"jump_cooldown_ticks", p.jump_cooldown_ticks},
            {"max_pad_impulse", p.max_pad_impulse}}},
          {"sensor",
           {{"azimuth_half_deg", s.azimuth_half_deg},
            {"elevation_half_deg", s.elevation_half_deg},
            {"max_ray_dist", s.max_ray_dist}}},
          {"reward",
           {{"sparse_success", r.sparse_success},
            {"sparse_fail", r.sparse_fail},
            {"dense_lambda", r.dense_lambda},
            {"step_penalty", r.step_penalty},
            {"success_radius", r.success_radius},
            {"no_progress_limit", r.no_progress_limit},
            {"max_episode_steps", r.max_episode_steps},
            {"action_repeat", r.action_repeat}}}};
}

json config_to_json(const PolicySpec& c) {
  json script = json::array();
  for (const Action& a : c.script) script.push_back({a.forward, a.strafe, a.turn, a.jump});
  return {{"kind", std::string(to_string(c.kind))},
          {"obstacle_jump_threshold", c.obstacle_jump_threshold},
          {"turn_gain", c.turn_gain},
          {"stuck_jump_after", c.stuck_jump_after},
          {"script", script}};
}

json config_to_json(const BuildConfig& c) {
  return {{"method", std::string(to_string(c.method))},
          {"n", c.n},
          {"k", c.k},
          {"repeats", c.repeats},
          {"success_threshold", c.success_threshold},
          {"placement_retries", c.placement_retries},
          {"radius_decay", c.radius_decay},
          {"probe_max_steps", c.probe_max_steps},
          {"seed", c.seed}};
}

json config_to_json(const HybridConfig& c) {
  return {{"stall_replan_steps", c.stall_replan_steps},
          {"waypoint_radius", c.waypoint_radius},
          {"max_replans", c.max_replans},
          {"replanning", c.replanning}};
}

json config_to_json(const EvalConfig& c) {
  return {{"goals", c.goals},
          {"full_goals", c.full_goals},
          {"seeds", c.seeds},
          {"goal_seed", c.goal_seed},
          {"episode_seed", c.episode_seed},
          {"max_episode_steps", c.max_episode_steps},
          {"bin_thresholds", {{"medium", c.bins.medium}, {"hard", c.bins.hard}}},
          {"methods", c.methods}};
}

json config_to_json(const RunConfig& c) {
  return {{"world", config_to_json(c.world)},
          {"sim", config_to_json(c.sim)},
          {"policy", config_to_json(c.policy)},
          {"build", config_to_json(c.build)},
          {"hybrid", config_to_json(c.hybrid)},
          {"eval", config_to_json(c.eval)},
          {"sweep",
           {{"node_counts", c.sweep.node_counts},
            {"k_values", c.sweep.k_values},
            {"seeds", c.sweep.seeds},
            {"query_count", c.sweep.query_count}}},
          {"output_dir", c.output_dir},
          {"jobs", c.jobs}};
}

namespace {

/// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }
  /// Rejects keys that were never read.
  void done() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError("unknown key '" + field(key) + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + " has the wrong type");
    }
  }

  std::optional<Section> sub(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return std::optional<Section>(std::in_place, *it, field(key));
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read(Section& s, WorldConfig& c) {
  s.get("seed", c.seed);
  s.get("extent_x", c.extent_x);
  s.get("extent_z", c.extent_z);
  s.get("height_scale", c.height_scale);
  s.get("cell_size", c.cell_size);
  s.get("noise_octaves", c.noise_octaves);
  if (auto f = s.sub("features")) {
    f->get("buildings", c.features.buildings);
    f->get("plateaus", c.features.plateaus);
    f->get("jump_pads", c.features.jump_pads);
    f->done();
  }
  s.get("hazard_fraction", c.hazard_fraction);
}

void read(Section& s, SimConfig& c) {
  if (auto p = s.sub("physics")) {
    p->get("dt", c.physics.dt);
    p->get("max_ground_speed", c.physics.max_ground_speed);
    p->get("ground_accel", c.physics.ground_accel);
    p->get("air_accel", c.physics.air_accel);
    p->get("jump_velocity", c.physics.jump_velocity);
    p->get("gravity", c.physics.gravity);
    p->get("turn_rate", c.physics.turn_rate);
    p->get("agent_radius", c.physics.agent_radius);
    p->get("agent_height", c.physics.agent_height);
    p->get("eye_height", c.physics.eye_height);
    p->get("step_height", c.physics.step_height);
    p->get("jump_cooldown_ticks", c.physics.jump_cooldown_ticks);
    p->get("max_pad_impulse", c.physics.max_pad_impulse);
    p->done();
  }
  if (auto p = s.sub("sensor")) {
    p->get("azimuth_half_deg", c.sensor.azimuth_half_deg);
    p->get("elevation_half_deg", c.sensor.elevation_half_deg);
    p->get("max_ray_dist", c.sensor.max_ray_dist);
    p->done();
  }
  if (auto p = s.sub("reward")) {
    p->get("sparse_success", c.reward.sparse_success);
    p->get("sparse_fail", c.reward.sparse_fail);
    p->get("dense_lambda", c.reward.dense_lambda);
    p->get("step_penalty", c.reward.step_penalty);
    p->get("success_radius", c.reward.success_radius);
    p->get("no_progress_limit", c.reward.no_progress_limit);
    p->get("max_episode_steps", c.reward.max_episode_steps);
    p->get("action_repeat", c.reward.action_repeat);
    p->done();
  }
}

void read(Section& s, PolicySpec& c) {
  std::string kind(to_string(c.kind));
  s.get("kind", kind);
  if (kind == "greedy_steer") {
    c.kind = PolicyKind::greedy_steer;
  } else if (kind == "scripted_fixture") {
    c.kind = PolicyKind::scripted_fixture;
  } else {
    throw ConfigError(s.field("kind") + ": unknown policy '" + kind + "'");
  }
  s.get("obstacle_jump_threshold", c.obstacle_jump_threshold);
  s.get("turn_gain", c.turn_gain);
  s.get("stuck_jump_after", c.stuck_jump_after);
  std::vector<std::array<double, 4>> script;
  s.get("script", script);
  c.script.clear();
  for (const auto& a : script) c.script.push_back({a[0], a[1], a[2], a[3]});
}

void read(Section& s, BuildConfig& c) {
  std::string method(to_string(c.method));
  s.get("method", method);
  c.method = parse_placement_method(method);
  s.get("n", c.n);
  s.get("k", c.k);
  s.get("repeats", c.repeats);
  s.get("success_threshold", c.success_threshold);
  s.get("placement_retries", c.placement_retries);
  s.get("radius_decay", c.radius_decay);
  s.get("probe_max_steps", c.probe_max_steps);
  s.get("seed", c.seed);
}

void read(Section& s, HybridConfig& c) {
  s.get("stall_replan_steps", c.stall_replan_steps);
  s.get("waypoint_radius", c.waypoint_radius);
  s.get("max_replans", c.max_replans);
  s.get("replanning", c.replanning);
}

void read(Section& s, EvalConfig& c) {
  s.get("goals", c.goals);
  s.get("full_goals", c.full_goals);
  s.get("seeds", c.seeds);
  s.get("goal_seed", c.goal_seed);
  s.get("episode_seed", c.episode_seed);
  s.get("max_episode_steps", c.max_episode_steps);
  if (auto b = s.sub("bin_thresholds")) {
    b->get("medium", c.bins.medium);
    b->get("hard", c.bins.hard);
    b->done();
  }
  s.get("methods", c.methods);
}

void read(Section& s, SweepSettings& c) {
  s.get("node_counts", c.node_counts);
  s.get("k_values", c.k_values);
  s.get("seeds", c.seeds);
  s.get("query_count", c.query_count);
}

}  // namespace

RunConfig run_config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(doc, "");
  const auto section = [&](const char* key, auto& target) {
    if (auto s = root.sub(key)) {
      read(*s, target);
      s->done();
    }
  };
  section("world", c.world);
  section("sim", c.sim);
  section("policy", c.policy);
  section("build", c.build);
  section("hybrid", c.hybrid);
  section("eval", c.eval);
  section("sweep", c.sweep);
  root.get("output_dir", c.output_dir);
  root.get("jobs", c.jobs);
  root.done();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

}  // namespace gnav
