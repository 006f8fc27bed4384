#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gnav/errors.hpp"
#include "gnav/localnav.hpp"
#include "gnav/simkernel.hpp"

using namespace gnav;

namespace {

AgentState standing_at(const Position& p, double heading = 0.0) {
  AgentState s;
  s.position = p;
  s.heading = heading;
  return s;
}

struct Replay {
  double dense = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

// Recomputes the episode reward from the recorded positions alone.
Replay replay_rewards(const Position& start, const Position& goal, const std::vector<TrajectoryTick>& ticks,
                      bool success, const RewardConfig& cfg) {
  Replay r;
  double best = distance(start, goal);
  for (const TrajectoryTick& t : ticks) {
    const double d = distance(t.position, goal);
    r.dense += (d < best ? best - d : 0.0) / cfg.dense_lambda;
    r.penalty += cfg.step_penalty;
    if (d < best) best = d;
  }
  r.total = (success ? cfg.sparse_success : cfg.sparse_fail) + r.dense + r.penalty;
  return r;
}

}  // namespace

TEST(StepPhysics, ZeroActionOnFlatGroundIsAFixedPoint) {
  const TerrainMap map = fixtures::flat_map(20, 20, 1.0);
  const AgentState s = standing_at({10, 1, 10}, 0.3);
  const AgentState n = step_physics(map, s, {}, PhysicsConfig{});
  EXPECT_EQ(n, s);
}

TEST(StepPhysics, JumpFollowsTheBallisticArc) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  const PhysicsConfig p;
  AgentState s = standing_at({10, 0, 10});
  s = step_physics(map, s, {0, 0, 0, 1}, p);
  ASSERT_TRUE(s.airborne);
  int ticks = 1;
  double apex = s.position.y;
  while (s.airborne && ticks < 1000) {
    s = step_physics(map, s, {}, p);
    apex = std::max(apex, s.position.y);
    ++ticks;
  }
  ASSERT_FALSE(s.airborne);
  EXPECT_EQ(s.position.y, 0.0);

  // Semi-implicit Euler: height after tick m is dt * sum_{i<m} (v - i g dt).
  double discrete_apex = 0.0;
  double y = 0.0;
  for (int i = 0; p.jump_velocity - i * p.gravity * p.dt > 0.0; ++i) {
    y += (p.jump_velocity - i * p.gravity * p.dt) * p.dt;
    discrete_apex = std::max(discrete_apex, y);
  }
  EXPECT_NEAR(apex, discrete_apex, 1e-9);

  const double airtime = 2.0 * p.jump_velocity / p.gravity;
  const double continuous_apex = p.jump_velocity * p.jump_velocity / (2.0 * p.gravity);
  EXPECT_NEAR(ticks * p.dt, airtime, 2.0 * p.dt);
  EXPECT_NEAR(apex, continuous_apex, p.jump_velocity * p.dt);
}

TEST(StepPhysics, SecondJumpFiresInTheAirAndThirdDoesNot) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  const PhysicsConfig p;
  AgentState s = standing_at({10, 3, 10});
  s.airborne = true;
  s.velocity.y = -1.0;
  s.jumps_used = 1;
  const AgentState second = step_physics(map, s, {0, 0, 0, 1}, p);
  EXPECT_EQ(second.velocity.y, p.jump_velocity);
  EXPECT_EQ(second.jumps_used, 2);

  s.jumps_used = 2;
  const AgentState third = step_physics(map, s, {0, 0, 0, 1}, p);
  EXPECT_DOUBLE_EQ(third.velocity.y, -1.0 - p.gravity * p.dt);
  EXPECT_EQ(third.jumps_used, 2);
}

TEST(StepPhysics, CooldownBlocksImmediateRejump) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  const PhysicsConfig p;
  AgentState s = step_physics(map, standing_at({10, 0, 10}), {0, 0, 0, 1}, p);
  const AgentState held = step_physics(map, s, {0, 0, 0, 1}, p);
  EXPECT_EQ(held.jumps_used, 1);
  EXPECT_LT(held.velocity.y, p.jump_velocity);
}

TEST(StepPhysics, PlanarSpeedSaturatesAtGroundSpeed) {
  const TerrainMap map = fixtures::flat_map(200, 200, 0.0);
  const PhysicsConfig p;
  AgentState s = standing_at({10, 0, 100}, kPi / 2);
  for (int i = 0; i < 120; ++i) s = step_physics(map, s, {1, 1, 0, 0}, p);
  EXPECT_NEAR(s.velocity.horizontal_length(), p.max_ground_speed, 1e-9);
}

TEST(StepPhysics, SpeedCapBoundsTheVelocity) {
  const TerrainMap map = fixtures::flat_map(50, 50, 0.0);
  const PhysicsConfig p;
  AgentState s = standing_at({25, 10, 25});
  s.airborne = true;
  s.velocity = {30, -40, 0};
  const AgentState n = step_physics(map, s, {}, p);
  EXPECT_LE(n.velocity.length(), p.speed_cap() + 1e-9);
}

TEST(StepPhysics, WallsStopHorizontalMotion) {
  const TerrainMap map = fixtures::flat_map(60, 60, 0.0, {{30, 0, 31, 60, -1, 10, false}});
  const PhysicsConfig p;
  AgentState s = standing_at({25, 0, 30}, kPi / 2);
  for (int i = 0; i < 300; ++i) s = step_physics(map, s, {1, 0, 0, 0}, p);
  EXPECT_LE(s.position.x, 30.0 - p.agent_radius + 1e-9);
  EXPECT_GT(s.position.x, 29.0);
}

TEST(StepPhysics, JumpPadLaunchesWithItsImpulse) {
  const TerrainMap map = fixtures::flat_map(30, 30, 0.0, {}, {{{15, 0, 15}, 9.0, 1.0}});
  const AgentState n = step_physics(map, standing_at({15, 0, 15}), {}, PhysicsConfig{});
  EXPECT_TRUE(n.airborne);
  EXPECT_EQ(n.velocity.y, 9.0);
}

TEST(StepPhysics, TurnRotatesHeadingAndWraps) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  const PhysicsConfig p;
  AgentState s = standing_at({10, 0, 10}, kPi - 0.01);
  s = step_physics(map, s, {0, 0, 1, 0}, p);
  EXPECT_NEAR(s.heading, kPi - 0.01 + p.turn_rate * p.dt - 2 * kPi, 1e-12);
}

TEST(Observe, GoalAheadAppearsOnTheForwardAxis) {
  const TerrainMap map = fixtures::flat_map(50, 50, 0.0);
  const Observation o = observe(map, standing_at({25, 0, 10}), {25, 0, 20}, PhysicsConfig{}, SensorConfig{});
  EXPECT_NEAR(o.goal_relative.x, 0.0, 1e-12);
  EXPECT_NEAR(o.goal_relative.y, 0.0, 1e-12);
  EXPECT_NEAR(o.goal_relative.z, 10.0, 1e-12);
}

TEST(Observe, GoalFrameFollowsHeading) {
  const TerrainMap map = fixtures::flat_map(50, 50, 0.0);
  // Facing +x; a goal at +z lies to the left.
  const Observation o = observe(map, standing_at({25, 0, 25}, kPi / 2), {25, 3, 30}, PhysicsConfig{}, SensorConfig{});
  EXPECT_NEAR(o.goal_relative.x, -5.0, 1e-12);
  EXPECT_NEAR(o.goal_relative.y, 3.0, 1e-12);
  EXPECT_NEAR(o.goal_relative.z, 0.0, 1e-12);
}

TEST(Observe, FlatPlaneDepthsMatchPlaneIntersection) {
  const TerrainMap map = fixtures::flat_map(400, 400, 0.0);
  const PhysicsConfig p;
  const SensorConfig sensor;
  const Observation o = observe(map, standing_at({200, 0, 200}, 0.7), {0, 0, 0}, p, sensor);
  for (int r = 0; r < Observation::kRows; ++r) {
    const double el = deg_to_rad(sensor.elevation_half_deg) * (1.0 - 2.0 * r / (Observation::kRows - 1));
    for (int c = 0; c < Observation::kCols; ++c) {
      const double expected = el < 0.0 ? std::min(p.eye_height / std::sin(-el), sensor.max_ray_dist) : sensor.max_ray_dist;
      EXPECT_NEAR(o.depth_at(r, c), expected, 1e-6) << r << "," << c;
    }
  }
}

TEST(Observe, IsPure) {
  WorldConfig cfg;
  cfg.seed = 2;
  cfg.extent_x = 100;
  cfg.extent_z = 100;
  const TerrainMap map = generate_map(cfg);
  const Position p = map.navigable_slots()[map.navigable_slots().size() / 2];
  const AgentState s = standing_at(p, 1.1);
  EXPECT_EQ(observe(map, s, {1, 2, 3}, PhysicsConfig{}, SensorConfig{}),
            observe(map, s, {1, 2, 3}, PhysicsConfig{}, SensorConfig{}));
}

TEST(StepReward, ImprovementExample) {
  const StepReward r = compute_step_reward(50, 48, RewardConfig{});
  EXPECT_DOUBLE_EQ(r.dense, 0.02);
  EXPECT_DOUBLE_EQ(r.reward, 0.0195);
  EXPECT_EQ(r.best, 48.0);
}

TEST(StepReward, NoImprovementExample) {
  const StepReward r = compute_step_reward(50, 55, RewardConfig{});
  EXPECT_EQ(r.dense, 0.0);
  EXPECT_DOUBLE_EQ(r.reward, -0.0005);
  EXPECT_EQ(r.best, 50.0);
}

TEST(RunEpisode, StartAtGoalSucceedsImmediately) {
  const TerrainMap map = fixtures::flat_map(20, 20, 0.0);
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult r = run_episode(map, {5, 0, 5}, {5, 0, 5}, policy, SimConfig{});
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.total_reward, 1.0);
  EXPECT_EQ(r.termination, Termination::reached);
  EXPECT_EQ(r.policy_queries, 0);
}

TEST(RunEpisode, NonNavigableEndpointsAreRejected) {
  const TerrainMap map = fixtures::lava_strip_map(40, 20, 10, 20);
  GreedySteerPolicy policy{PolicySpec{}};
  EXPECT_THROW(run_episode(map, {15, -0.5, 5}, {5, 0, 5}, policy, SimConfig{}), PreconditionError);
  EXPECT_THROW(run_episode(map, {5, 0, 5}, {5, 3, 5}, policy, SimConfig{}), PreconditionError);
}

TEST(RunEpisode, FlatThirtyMetersTakesAboutTheKinematicTime) {
  const TerrainMap map = fixtures::flat_map(100, 100, 0.0);
  const SimConfig cfg;
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult r = run_episode(map, {50, 0, 20}, {50, 0, 50}, policy, cfg);
  ASSERT_TRUE(r.success);
  const double bound = 30.0 / (cfg.physics.max_ground_speed * cfg.physics.dt);
  EXPECT_GE(r.steps, 0.8 * bound);
  EXPECT_LE(r.steps, 1.2 * bound);
}

TEST(RunEpisode, LavaBasinDefeatsTheStraightLinePolicy) {
  const TerrainMap map = fixtures::lava_strip_map(80, 40, 30, 50);
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult r = run_episode(map, {20.5, 0, 20.5}, {60.5, 0, 20.5}, policy, SimConfig{});
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.termination == Termination::fell_off || r.termination == Termination::no_progress)
      << to_string(r.termination);
}

TEST(RunEpisode, StandingStillStopsAfterTheNoProgressLimit) {
  const TerrainMap map = fixtures::flat_map(50, 50, 0.0);
  ScriptedPolicy still({Action{}});
  const SimConfig cfg;
  const EpisodeResult r = run_episode(map, {10, 0, 10}, {30, 0, 30}, still, cfg);
  EXPECT_EQ(r.termination, Termination::no_progress);
  EXPECT_EQ(r.steps, cfg.reward.no_progress_limit);
  EXPECT_FALSE(r.success);
  EXPECT_DOUBLE_EQ(r.total_reward, -1.0 + cfg.reward.no_progress_limit * cfg.reward.step_penalty);
}

TEST(RunEpisode, ProgressResetsTheNoProgressCounter) {
  const TerrainMap map = fixtures::flat_map(100, 100, 0.0);
  // Walk for 20 decisions, stand still afterwards.
  std::vector<Action> script(20, Action{1, 0, 0, 0});
  script.push_back(Action{});
  ScriptedPolicy policy(script);
  const SimConfig cfg;
  EpisodeOptions opts;
  opts.initial_heading = 0.0;
  const EpisodeResult r = run_episode(map, {50, 0, 5}, {50, 0, 95}, policy, cfg, opts);
  EXPECT_EQ(r.termination, Termination::no_progress);
  EXPECT_GT(r.steps, 200 + cfg.reward.no_progress_limit);
}

TEST(RunEpisode, StepCapEndsLongEpisodes) {
  const TerrainMap map = fixtures::flat_map(100, 100, 0.0);
  SimConfig cfg;
  cfg.reward.max_episode_steps = 50;
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult r = run_episode(map, {50, 0, 5}, {50, 0, 95}, policy, cfg);
  EXPECT_EQ(r.termination, Termination::step_cap);
  EXPECT_EQ(r.steps, 50);
}

TEST(RunEpisode, SuccessFiresOnTheFirstTickInsideTheRadius) {
  const TerrainMap map = fixtures::flat_map(100, 100, 0.0);
  const SimConfig cfg;
  const Position start{50, 0, 10};
  const Position goal{50, 0, 40};
  std::vector<TrajectoryTick> ticks;
  EpisodeOptions opts;
  opts.trajectory = &ticks;
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult r = run_episode(map, start, goal, policy, cfg, opts);
  ASSERT_TRUE(r.success);
  ASSERT_EQ(ticks.size(), static_cast<std::size_t>(r.steps));
  for (std::size_t i = 0; i + 1 < ticks.size(); ++i) ASSERT_GT(distance(ticks[i].position, goal), cfg.reward.success_radius);
  EXPECT_LE(distance(ticks.back().position, goal), cfg.reward.success_radius);
  EXPECT_EQ(r.final_position, ticks.back().position);
}

TEST(RunEpisode, SmallerSuccessRadiusNeedsMoreSteps) {
  const TerrainMap map = fixtures::flat_map(100, 100, 0.0);
  SimConfig wide;
  wide.reward.success_radius = 3.0;
  SimConfig tight;
  tight.reward.success_radius = 0.5;
  GreedySteerPolicy policy{PolicySpec{}};
  const EpisodeResult a = run_episode(map, {50, 0, 10}, {50, 0, 40}, policy, wide);
  const EpisodeResult b = run_episode(map, {50, 0, 10}, {50, 0, 40}, policy, tight);
  ASSERT_TRUE(a.success);
  ASSERT_TRUE(b.success);
  EXPECT_LT(a.steps, b.steps);
}

class GeneratedEpisodes : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    WorldConfig cfg;
    cfg.seed = 77;
    cfg.extent_x = 120;
    cfg.extent_z = 120;
    map_ = new TerrainMap(generate_map(cfg));
  }
  static void TearDownTestSuite() {
    delete map_;
    map_ = nullptr;
  }
  static TerrainMap* map_;
};

TerrainMap* GeneratedEpisodes::map_ = nullptr;

TEST_F(GeneratedEpisodes, RewardReplayQueryCountAndNoPenetration) {
  const SimConfig cfg;
  RngStream rng(12);
  for (int e = 0; e < 40; ++e) {
    const Position a = sample_navigable(*map_, rng);
    const Position b = sample_navigable(*map_, rng);
    std::vector<TrajectoryTick> ticks;
    EpisodeOptions opts;
    opts.trajectory = &ticks;
    opts.initial_heading = rng.uniform(-kPi, kPi);
    GreedySteerPolicy policy{PolicySpec{}};
    const EpisodeResult r = run_episode(*map_, a, b, policy, cfg, opts);

    const Replay replay = replay_rewards(a, b, ticks, r.success, cfg.reward);
    ASSERT_EQ(replay.dense, r.breakdown.dense);
    ASSERT_EQ(replay.penalty, r.breakdown.penalty);
    ASSERT_EQ(replay.total, r.total_reward);
    ASSERT_EQ(r.policy_queries, (r.steps + cfg.reward.action_repeat - 1) / cfg.reward.action_repeat);
    ASSERT_EQ(r.success, r.termination == Termination::reached);
    ASSERT_LE(r.steps, cfg.reward.max_episode_steps);

    for (const TrajectoryTick& t : ticks) {
      const Position center = t.position + Vec3{0, 0.9, 0};
      for (const Box& box : map_->boxes()) {
        ASSERT_FALSE(box.contains(t.position)) << "episode " << e << " tick " << t.tick;
        ASSERT_FALSE(box.contains(center)) << "episode " << e << " tick " << t.tick;
      }
      if (map_->in_extent(t.position.x, t.position.z)) {
        ASSERT_GE(t.position.y, map_->terrain_height(t.position.x, t.position.z) - 1e-9);
      }
    }
  }
}

TEST_F(GeneratedEpisodes, EpisodesAreDeterministic) {
  const SimConfig cfg;
  RngStream rng(3);
  for (int e = 0; e < 5; ++e) {
    const Position a = sample_navigable(*map_, rng);
    const Position b = sample_navigable(*map_, rng);
    GreedySteerPolicy p1{PolicySpec{}};
    GreedySteerPolicy p2{PolicySpec{}};
    EXPECT_EQ(run_episode(*map_, a, b, p1, cfg), run_episode(*map_, a, b, p2, cfg));
  }
}

TEST(Configs, ValidationNamesTheField) {
  PhysicsConfig p;
  p.dt = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  SensorConfig s;
  s.elevation_half_deg = 95;
  EXPECT_THROW(s.validate(), ConfigError);
  RewardConfig r;
  r.action_repeat = 0;
  EXPECT_THROW(r.validate(), ConfigError);
  EXPECT_NO_THROW(SimConfig{}.validate());
}

TEST(Termination, NamesAreStable) {
  EXPECT_EQ(to_string(Termination::reached), "reached");
  EXPECT_EQ(to_string(Termination::fell_off), "fell_off");
  EXPECT_EQ(to_string(Termination::no_progress), "no_progress");
  EXPECT_EQ(to_string(Termination::step_cap), "step_cap");
  EXPECT_EQ(to_string(Termination::no_plan), "no_plan");
}
