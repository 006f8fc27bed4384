#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnav/graphbuild.hpp"
#include "gnav/localnav.hpp"
#include "gnav/nav_graph.hpp"
#include "gnav/planner.hpp"
#include "gnav/simkernel.hpp"
#include "gnav/worldgen.hpp"

namespace gnav {

enum class GoalBin : std::uint8_t { easy = 0, medium = 1, hard = 2 };
inline constexpr std::size_t kBinCount = 3;

std::string_view to_string(GoalBin b);
GoalBin parse_goal_bin(std::string_view s);

/// Left-closed bins: easy < medium <= medium-range < hard <= hard-range.
struct BinThresholds {
  double medium = 50.0;
  double hard = 125.0;

  GoalBin classify(double dist) const;
  void validate() const;
  bool operator==(const BinThresholds&) const = default;
};

struct GoalPair {
  Position start;
  Position goal;
  double distance = 0.0;
  GoalBin bin = GoalBin::easy;
  bool operator==(const GoalPair&) const = default;
};

struct GoalSet {
  std::uint64_t seed = 0;
  BinThresholds thresholds;
  std::vector<GoalPair> pairs;
  bool operator==(const GoalSet&) const = default;
};

/// Minimum share of pairs each bin receives.
inline constexpr double kMinBinShare = 0.1;

/// Draws start/goal pairs further apart than min_separation. A pair is rejected when taking it
/// would leave too few slots for another bin to reach its minimum share (capped at count / 3).
/// Throws GenerationError when the map cannot produce hard pairs.
GoalSet sample_goals(const TerrainMap& map, int count, const BinThresholds& thresholds, std::uint64_t seed,
                     double min_separation);

std::string goals_to_json(const GoalSet& goals);
GoalSet goals_from_json(std::string_view text);
void save_goals(const GoalSet& goals, const std::filesystem::path& path);
/// Throws ConfigError when the file holds no pairs.
GoalSet load_goals(const std::filesystem::path& path);

enum class MethodKind { direct, hybrid };

struct MethodSpec {
  MethodKind kind = MethodKind::direct;
  std::string label = "direct";
  const NavGraph* graph = nullptr;  // required for hybrid
  HybridConfig hybrid;
};

struct EpisodeRecord {
  std::size_t goal_index = 0;
  bool success = false;
  int steps = 0;
  int replans = 0;
  double plan_ms = 0.0;
  Termination termination = Termination::step_cap;
};

struct BinStats {
  int attempts = 0;
  int successes = 0;
  double rate() const { return attempts > 0 ? static_cast<double>(successes) / attempts : 0.0; }
};

struct SeedRun {
  std::uint64_t episode_seed = 0;
  std::vector<EpisodeRecord> records;  // one per goal pair, in goal order
  std::array<BinStats, kBinCount> bins{};
  BinStats overall;
  double eval_wall_time_s = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across seeds
};

struct EvalReport {
  std::string method;
  std::vector<SeedRun> runs;
  std::array<MeanStd, kBinCount> bin_rates{};
  MeanStd overall_rate;
  // Timing; excluded from determinism comparisons.
  double build_wall_time_s = 0.0;
  double eval_wall_time_s = 0.0;
  double plan_ms_mean = 0.0;
  double plan_ms_p95 = 0.0;
};

/// Spawn heading of goal pair i under an episode seed.
double episode_heading(std::uint64_t episode_seed, std::size_t goal_index);

SeedRun run_goal_set(const TerrainMap& map, const GoalSet& goals, const MethodSpec& method, const PolicySpec& policy,
                     const SimConfig& sim, std::uint64_t episode_seed, int jobs = 0);

/// One run per episode seed, aggregated into mean and standard deviation.
EvalReport evaluate_method(const TerrainMap& map, const GoalSet& goals, const MethodSpec& method,
                           const PolicySpec& policy, const SimConfig& sim, std::span<const std::uint64_t> episode_seeds,
                           int jobs = 0);

/// Canonical JSON. `config` is echoed verbatim; timing figures live under "timing".
std::string report_to_json(const EvalReport& report, const GoalSet& goals, const std::string& config_json);
/// Columns: seed,goal,start_x,start_y,start_z,goal_x,goal_y,goal_z,distance,bin,method,success,steps,replans,plan_ms
std::string report_to_csv(const EvalReport& report, const GoalSet& goals);
/// Table with All/Easy/Medium/Hard columns, one row per report.
std::string summary_table(std::span<const EvalReport> reports);

struct TimingStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::vector<double> per_query_ms;
};

/// Times snapping plus shortest_path between random points of the vertex bounding box.
TimingStats timing_probe(const NavGraph& graph, int query_count, std::uint64_t seed);

struct SweepMap {
  std::string name;
  const TerrainMap* map = nullptr;
  const GoalSet* goals = nullptr;
};

struct SweepConfig {
  std::vector<int> node_counts;
  std::vector<int> k_values;
  std::vector<std::uint64_t> seeds;  // build seed and episode seed of each replicate
  BuildConfig build;                 // n, k and seed are overridden per cell
  HybridConfig hybrid;
  int query_count = 1000;
  int jobs = 0;
  void validate() const;
};

struct SweepCell {
  std::string map;
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::array<double, kBinCount> bin_rates{};
  double overall_rate = 0.0;
  std::size_t edges = 0;
  std::size_t probe_episodes = 0;
  double build_s = 0.0;
  double eval_s = 0.0;
  double query_ms = 0.0;
  bool resumed = false;
};

/// Content hash of everything that determines a cell's result.
std::string sweep_cell_key(const SweepMap& map, int n, int k, std::uint64_t seed, const SweepConfig& cfg,
                           const PolicySpec& policy, const SimConfig& sim);

/// Full Cartesian sweep. When cell_dir is set, finished cells are stored there and reloaded
/// instead of recomputed on the next call.
std::vector<SweepCell> sweep(std::span<const SweepMap> maps, const SweepConfig& cfg, const PolicySpec& policy,
                             const SimConfig& sim, const std::optional<std::filesystem::path>& cell_dir = std::nullopt);

/// Columns: n,k,seed,map,bin,success_rate,build_s,eval_s,query_ms; bins are all, easy, medium, hard.
std::string sweep_to_csv(std::span<const SweepCell> cells);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace gnav
