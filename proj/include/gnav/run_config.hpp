#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gnav/evalharness.hpp"
#include "gnav/graphbuild.hpp"
#include "gnav/localnav.hpp"
#include "gnav/planner.hpp"
#include "gnav/simkernel.hpp"
#include "gnav/worldgen.hpp"

namespace gnav {

struct EvalConfig {
  int goals = 250;
  int full_goals = 2500;  // used instead of `goals` when a full run is requested
  int seeds = 3;          // replicate i uses episode_seed + i
  std::uint64_t goal_seed = 1;
  std::uint64_t episode_seed = 1;
  int max_episode_steps = 6000;  // replaces sim.reward.max_episode_steps in evaluation episodes
  BinThresholds bins;
  std::vector<std::string> methods{"direct", "hybrid"};

  void validate() const;
  std::vector<std::uint64_t> episode_seeds() const;
  /// `sim` with the evaluation step cap applied.
  SimConfig episode_sim(const SimConfig& sim) const;
  bool operator==(const EvalConfig&) const = default;
};

struct SweepSettings {
  std::vector<int> node_counts{50, 100, 200, 400, 800};
  std::vector<int> k_values{5, 10, 20, 40};
  std::vector<std::uint64_t> seeds{1};
  int query_count = 1000;
  bool operator==(const SweepSettings&) const = default;
};

struct RunConfig {
  WorldConfig world;
  SimConfig sim;
  PolicySpec policy;
  BuildConfig build;
  HybridConfig hybrid;
  EvalConfig eval;
  SweepSettings sweep;
  std::string output_dir = "out";
  int jobs = 0;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json config_to_json(const WorldConfig& c);
nlohmann::json config_to_json(const SimConfig& c);
nlohmann::json config_to_json(const PolicySpec& c);
nlohmann::json config_to_json(const BuildConfig& c);
nlohmann::json config_to_json(const HybridConfig& c);
nlohmann::json config_to_json(const EvalConfig& c);
nlohmann::json config_to_json(const RunConfig& c);

/// Strict parse: unknown keys and wrongly typed values raise ConfigError naming the field.
/// Missing keys keep their defaults. The result is validated.
RunConfig run_config_from_json(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace gnav
