#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gnav/geometry.hpp"
#include "gnav/worldgen.hpp"

namespace gnav {

struct PhysicsConfig {
  double dt = 1.0 / 60.0;
  double max_ground_speed = 6.0;
  double ground_accel = 15.0;  // m/s^2 toward the commanded planar velocity
  double air_accel = 10.0;
  double jump_velocity = 6.0;
  double gravity = 9.81;
  double turn_rate = kPi;  // rad/s at |turn| = 1
  double agent_radius = 0.4;
  double agent_height = 1.8;
  double eye_height = 1.6;
  double step_height = 0.4;
  int jump_cooldown_ticks = 10;
  double max_pad_impulse = 12.0;  // bound used for the speed cap

  /// Speed cap applied every tick: ground speed plus the strongest jump-pad launch.
  double speed_cap() const { return max_ground_speed + max_pad_impulse; }
  void validate() const;
  bool operator==(const PhysicsConfig&) const = default;
};

struct SensorConfig {
  double azimuth_half_deg = 60.0;
  double elevation_half_deg = 40.0;
  double max_ray_dist = 50.0;
  void validate() const;
  bool operator==(const SensorConfig&) const = default;
};

struct RewardConfig {
  double sparse_success = 1.0;
  double sparse_fail = -1.0;
  double dense_lambda = 100.0;
  double step_penalty = -0.0005;
  double success_radius = 1.0;
  int no_progress_limit = 300;  // raw ticks
  int max_episode_steps = 3000;
  int action_repeat = 10;
  void validate() const;
  bool operator==(const RewardConfig&) const = default;
};

struct SimConfig {
  PhysicsConfig physics;
  SensorConfig sensor;
  RewardConfig reward;
  void validate() const {
    physics.validate();
    sensor.validate();
    reward.validate();
  }
  bool operator==(const SimConfig&) const = default;
};

struct AgentState {
  Position position;  // feet
  Vec3 velocity;
  Vec3 acceleration;  // velocity change over the last tick
  double heading = 0.0;  // radians; 0 faces +z, positive turns toward +x
  bool airborne = false;
  int jumps_used = 0;
  int jump_cooldown = 0;  // ticks until another jump may trigger
  bool operator==(const AgentState&) const = default;
};

struct Action {
  double forward = 0.0;
  double strafe = 0.0;
  double turn = 0.0;
  double jump = 0.0;

  Action clamped() const;
  bool operator==(const Action&) const = default;
};

/// Depth image is row-major, row 0 is the highest elevation, column 0 the leftmost azimuth.
struct Observation {
  static constexpr int kRows = 8;
  static constexpr int kCols = 8;
  std::array<double, kRows * kCols> depth{};
  Vec3 goal_relative;  // (right, up, forward) in the agent frame
  Vec3 velocity;
  Vec3 acceleration;

  double depth_at(int row, int col) const { return depth[static_cast<std::size_t>(row) * kCols + col]; }
  bool operator==(const Observation&) const = default;
};

/// Basis vectors of the agent heading frame.
Vec3 heading_forward(double heading);
Vec3 heading_right(double heading);

/// Local (right, up, forward) ray direction for cone cell (row, col).
Vec3 sensor_ray_local(const SensorConfig& sensor, int row, int col);

AgentState step_physics(const TerrainMap& map, const AgentState& state, const Action& action,
                        const PhysicsConfig& physics);

Observation observe(const TerrainMap& map, const AgentState& state, const Position& goal,
                    const PhysicsConfig& physics, const SensorConfig& sensor);

struct StepReward {
  double dense = 0.0;
  double penalty = 0.0;
  double reward = 0.0;  // dense + penalty
  double best = 0.0;    // updated best distance
};

StepReward compute_step_reward(double prev_best_dist, double new_dist, const RewardConfig& cfg);

/// no_plan is only produced by the hybrid executor when the graph offers no route.
enum class Termination : std::uint8_t { reached, fell_off, no_progress, step_cap, no_plan };

std::string_view to_string(Termination t);

struct RewardBreakdown {
  double sparse = 0.0;
  double dense = 0.0;
  double penalty = 0.0;
  bool operator==(const RewardBreakdown&) const = default;
};

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double total_reward = 0.0;  // sparse + dense + penalty, summed in that order
  RewardBreakdown breakdown;
  Termination termination = Termination::step_cap;
  Position final_position;
  int policy_queries = 0;
  bool operator==(const EpisodeResult&) const = default;
};

struct TrajectoryTick {
  int tick = 0;
  Position position;
  Action action;
  double reward = 0.0;
};

class LocalPolicy;

struct EpisodeOptions {
  /// Initial heading; when unset the agent starts facing the goal.
  std::optional<double> initial_heading;
  /// Optional per-tick trajectory record.
  std::vector<TrajectoryTick>* trajectory = nullptr;
};

/// Per-tick episode bookkeeping shared by the plain episode loop and the hybrid executor:
/// action repeat, reward accumulation against the final goal, and the hard terminations
/// (goal reached, fell off, step cap). The caller decides on progress-based terminations.
class EpisodeDriver {
 public:
  EpisodeDriver(const TerrainMap& map, const SimConfig& cfg, const Position& start, const Position& goal,
                const EpisodeOptions& options);

  /// Runs one tick steering toward `target`. Returns a termination when one fires.
  std::optional<Termination> tick(LocalPolicy& policy, const Position& target);

  const AgentState& state() const { return state_; }
  int steps() const { return steps_; }
  /// Ticks since the best distance to the final goal last improved.
  int ticks_without_progress() const { return no_progress_; }
  double best_goal_distance() const { return best_; }
  bool started_at_goal() const { return start_at_goal_; }

  EpisodeResult finish(Termination reason) const;

 private:
  const TerrainMap& map_;
  const SimConfig& cfg_;
  Position goal_;
  AgentState state_;
  EpisodeOptions options_;
  Action action_;
  double best_ = 0.0;
  double dense_ = 0.0;
  double penalty_ = 0.0;
  int steps_ = 0;
  int no_progress_ = 0;
  int queries_ = 0;
  bool start_at_goal_ = false;
};

/// Point-goal episode. Throws PreconditionError when start or goal is not navigable.
EpisodeResult run_episode(const TerrainMap& map, const Position& start, const Position& goal, LocalPolicy& policy,
                          const SimConfig& cfg, const EpisodeOptions& options = {});

/// True when the agent stands on a hazard cell or dropped below the world.
bool fell_off_map(const TerrainMap& map, const AgentState& state);

}  // namespace gnav
