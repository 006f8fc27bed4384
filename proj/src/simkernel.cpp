#include "gnav/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnav/errors.hpp"
#include "gnav/localnav.hpp"

namespace gnav {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
  if (a > kPi || a <= -kPi) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
  }
  return a;
}

bool horizontally_blocked(const TerrainMap& map, double x, double z, double feet, const PhysicsConfig& p) {
  for (std::uint32_t i : map.boxes_near(x, z)) {
    const Box& b = map.boxes()[i];
    if (b.top > feet + p.step_height && b.bottom < feet + p.agent_height && b.footprint_contains(x, z, p.agent_radius))
      return true;
  }
  return map.in_extent(x, z) && map.terrain_height(x, z) > feet + p.step_height;
}

/// Highest surface under the agent cylinder that it could stand on from `feet`.
double support_height(const TerrainMap& map, double x, double z, double feet, const PhysicsConfig& p) {
  double s = map.in_extent(x, z) ? map.terrain_height(x, z) : kNegInf;
  for (std::uint32_t i : map.boxes_near(x, z)) {
    const Box& b = map.boxes()[i];
    if (b.top <= feet + p.step_height && b.top > s && b.footprint_contains(x, z, p.agent_radius)) s = b.top;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config validation

void PhysicsConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("physics.dt must be positive");
  if (!(max_ground_speed > 0.0)) throw ConfigError("physics.max_ground_speed must be positive");
  if (!(ground_accel > 0.0) || !(air_accel > 0.0)) throw ConfigError("physics accelerations must be positive");
  if (!(jump_velocity > 0.0)) throw ConfigError("physics.jump_velocity must be positive");
  if (!(gravity > 0.0)) throw ConfigError("physics.gravity must be positive");
  if (!(turn_rate > 0.0)) throw ConfigError("physics.turn_rate must be positive");
  if (!(agent_radius > 0.0) || !(agent_height > 0.0)) throw ConfigError("physics agent dimensions must be positive");
  if (!(eye_height > 0.0 && eye_height <= agent_height)) throw ConfigError("physics.eye_height must be in (0, agent_height]");
  if (!(step_height >= 0.0)) throw ConfigError("physics.step_height must be non-negative");
  if (jump_cooldown_ticks < 0) throw ConfigError("physics.jump_cooldown_ticks must be non-negative");
  if (!(max_pad_impulse >= 0.0)) throw ConfigError("physics.max_pad_impulse must be non-negative");
}

void SensorConfig::validate() const {
  if (!(azimuth_half_deg > 0.0 && azimuth_half_deg < 180.0)) throw ConfigError("sensor.azimuth_half_deg out of range");
  if (!(elevation_half_deg > 0.0 && elevation_half_deg < 90.0))
    throw ConfigError("sensor.elevation_half_deg out of range");
  if (!(max_ray_dist > 0.0)) throw ConfigError("sensor.max_ray_dist must be positive");
}

void RewardConfig::validate() const {
  if (!(success_radius > 0.0)) throw ConfigError("reward.success_radius must be positive");
  if (action_repeat < 1) throw ConfigError("reward.action_repeat must be >= 1");
  if (no_progress_limit <= 0) throw ConfigError("reward.no_progress_limit must be positive");
  if (max_episode_steps <= 0) throw ConfigError("reward.max_episode_steps must be positive");
  if (!(dense_lambda > 0.0)) throw ConfigError("reward.dense_lambda must be positive");
}

Action Action::clamped() const {
  const auto c = [](double v) { return std::isfinite(v) ? std::clamp(v, -1.0, 1.0) : 0.0; };
  return {c(forward), c(strafe), c(turn), c(jump)};
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached: return "reached";
    case Termination::fell_off: return "fell_off";
    case Termination::no_progress: return "no_progress";
    case Termination::step_cap: return "step_cap";
    case Termination::no_plan: return "no_plan";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Physics

Vec3 heading_forward(double heading) { return {std::sin(heading), 0.0, std::cos(heading)}; }
Vec3 heading_right(double heading) { return {std::cos(heading), 0.0, -std::sin(heading)}; }

AgentState step_physics(const TerrainMap& map, const AgentState& s, const Action& action, const PhysicsConfig& p) {
  const Action a = action.clamped();
  const double dt = p.dt;
  AgentState n = s;

  if (a.turn != 0.0) n.heading = wrap_angle(s.heading + a.turn * p.turn_rate * dt);
  const Vec3 fwd = heading_forward(n.heading);
  const Vec3 right = heading_right(n.heading);

  // Planar velocity chases the commanded velocity under an acceleration limit.
  Vec3 wish = fwd * a.forward + right * a.strafe;
  const double wish_len = wish.horizontal_length();
  if (wish_len > 1.0) wish = wish * (1.0 / wish_len);
  const double dvx = wish.x * p.max_ground_speed - s.velocity.x;
  const double dvz = wish.z * p.max_ground_speed - s.velocity.z;
  const double dv = std::hypot(dvx, dvz);
  const double max_dv = (s.airborne ? p.air_accel : p.ground_accel) * dt;
  const double k = dv > max_dv ? max_dv / dv : 1.0;
  n.velocity.x = s.velocity.x + dvx * k;
  n.velocity.z = s.velocity.z + dvz * k;

  n.jump_cooldown = std::max(0, s.jump_cooldown - 1);
  if (a.jump > 0.5 && s.jumps_used < 2 && s.jump_cooldown == 0) {
    n.velocity.y = p.jump_velocity;
    n.airborne = true;
    n.jumps_used = s.jumps_used + 1;
    n.jump_cooldown = p.jump_cooldown_ticks;
  } else if (s.airborne) {
    n.velocity.y = s.velocity.y - p.gravity * dt;
  } else {
    n.velocity.y = 0.0;
  }

  const double speed = n.velocity.length();
  if (speed > p.speed_cap()) n.velocity = n.velocity * (p.speed_cap() / speed);

  // Horizontal move with axis-separated sliding against walls.
  const double feet = s.position.y;
  double x = s.position.x + n.velocity.x * dt;
  double z = s.position.z + n.velocity.z * dt;
  if (horizontally_blocked(map, x, z, feet, p)) {
    if (!horizontally_blocked(map, x, s.position.z, feet, p)) {
      z = s.position.z;
      n.velocity.z = 0.0;
    } else if (!horizontally_blocked(map, s.position.x, z, feet, p)) {
      x = s.position.x;
      n.velocity.x = 0.0;
    } else {
      x = s.position.x;
      z = s.position.z;
      n.velocity.x = 0.0;
      n.velocity.z = 0.0;
    }
  }
  n.position.x = x;
  n.position.z = z;

  // Vertical resolution against the supporting surface.
  const double support = support_height(map, x, z, feet, p);
  double y = feet;
  if (!n.airborne) {
    if (support >= feet - p.step_height) {
      y = support;
    } else {
      n.airborne = true;
      n.velocity.y = -p.gravity * dt;
    }
  }
  if (n.airborne) {
    const double next = feet + n.velocity.y * dt;
    if (next <= support && n.velocity.y <= 0.0) {
      y = support;
      n.velocity.y = 0.0;
      n.airborne = false;
      n.jumps_used = 0;
    } else {
      y = std::max(next, support);
    }
  }
  n.position.y = y;

  if (!n.airborne) {
    for (const JumpPad& pad : map.jump_pads()) {
      if (std::abs(y - pad.position.y) < 0.5 && std::hypot(x - pad.position.x, z - pad.position.z) <= pad.radius) {
        n.velocity.y = std::min(pad.impulse, p.max_pad_impulse);
        n.airborne = true;
        break;
      }
    }
  }

  n.acceleration = (n.velocity - s.velocity) * (1.0 / dt);
  return n;
}

bool fell_off_map(const TerrainMap& map, const AgentState& s) {
  if (s.position.y < map.min_terrain() - 10.0) return true;
  if (s.airborne || !map.in_extent(s.position.x, s.position.z)) return false;
  if (map.kind_at(s.position.x, s.position.z) == CellKind::ground) return false;
  // Standing on a roof above a hazard cell is safe.
  for (std::uint32_t i : map.boxes_near(s.position.x, s.position.z)) {
    const Box& b = map.boxes()[i];
    if (s.position.y >= b.top - 1e-6 && b.footprint_contains(s.position.x, s.position.z, 0.5)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Observation

Vec3 sensor_ray_local(const SensorConfig& sensor, int row, int col) {
  const double el_half = deg_to_rad(sensor.elevation_half_deg);
  const double az_half = deg_to_rad(sensor.azimuth_half_deg);
  const double el = el_half - 2.0 * el_half * row / (Observation::kRows - 1);
  const double az = -az_half + 2.0 * az_half * col / (Observation::kCols - 1);
  return {std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)};
}

Observation observe(const TerrainMap& map, const AgentState& state, const Position& goal, const PhysicsConfig& physics,
                    const SensorConfig& sensor) {
  Observation obs;
  const Vec3 fwd = heading_forward(state.heading);
  const Vec3 right = heading_right(state.heading);
  const Position eye = state.position + Vec3{0.0, physics.eye_height, 0.0};

  // Broad phase: boxes whose footprint is within ray range of the eye.
  std::vector<std::uint32_t> near;
  const auto boxes = map.boxes();
  for (std::uint32_t i = 0; i < boxes.size(); ++i) {
    const Box& b = boxes[i];
    const double dx = std::max({b.min_x - eye.x, 0.0, eye.x - b.max_x});
    const double dz = std::max({b.min_z - eye.z, 0.0, eye.z - b.max_z});
    if (dx * dx + dz * dz <= sensor.max_ray_dist * sensor.max_ray_dist) near.push_back(i);
  }

  for (int r = 0; r < Observation::kRows; ++r) {
    for (int c = 0; c < Observation::kCols; ++c) {
      const Vec3 l = sensor_ray_local(sensor, r, c);
      const Vec3 dir = right * l.x + Vec3{0.0, l.y, 0.0} + fwd * l.z;
      const double d = raycast(map, eye, dir, sensor.max_ray_dist, near);
      obs.depth[static_cast<std::size_t>(r) * Observation::kCols + c] = std::max(d, 1e-3);
    }
  }
  const Vec3 g = goal - state.position;
  obs.goal_relative = {dot(g, right), g.y, dot(g, fwd)};
  obs.velocity = state.velocity;
  obs.acceleration = state.acceleration;
  return obs;
}

// ---------------------------------------------------------------------------
// Rewards and episodes

StepReward compute_step_reward(double prev_best_dist, double new_dist, const RewardConfig& cfg) {
  StepReward r;
  r.dense = std::max(0.0, prev_best_dist - new_dist) / cfg.dense_lambda;
  r.penalty = cfg.step_penalty;
  r.reward = r.dense + r.penalty;
  r.best = std::min(prev_best_dist, new_dist);
  return r;
}

EpisodeDriver::EpisodeDriver(const TerrainMap& map, const SimConfig& cfg, const Position& start, const Position& goal,
                             const EpisodeOptions& options)
    : map_(map), cfg_(cfg), goal_(goal), options_(options) {
  state_.position = start;
  state_.heading = options.initial_heading ? wrap_angle(*options.initial_heading)
                                           : std::atan2(goal.x - start.x, goal.z - start.z);
  best_ = distance(start, goal);
  start_at_goal_ = best_ <= cfg.reward.success_radius;
}

std::optional<Termination> EpisodeDriver::tick(LocalPolicy& policy, const Position& target) {
  if (steps_ % cfg_.reward.action_repeat == 0) {
    action_ = policy.act(observe(map_, state_, target, cfg_.physics, cfg_.sensor));
    ++queries_;
  }
  state_ = step_physics(map_, state_, action_, cfg_.physics);
  ++steps_;

  const double d = distance(state_.position, goal_);
  const StepReward r = compute_step_reward(best_, d, cfg_.reward);
  no_progress_ = d < best_ ? 0 : no_progress_ + 1;
  best_ = r.best;
  dense_ += r.dense;
  penalty_ += r.penalty;
  if (options_.trajectory) options_.trajectory->push_back({steps_, state_.position, action_, r.reward});

  if (d <= cfg_.reward.success_radius) return Termination::reached;
  if (fell_off_map(map_, state_)) return Termination::fell_off;
  if (steps_ >= cfg_.reward.max_episode_steps) return Termination::step_cap;
  return std::nullopt;
}

EpisodeResult EpisodeDriver::finish(Termination reason) const {
  EpisodeResult res;
  res.success = reason == Termination::reached;
  res.steps = steps_;
  res.breakdown.sparse = res.success ? cfg_.reward.sparse_success : cfg_.reward.sparse_fail;
  res.breakdown.dense = dense_;
  res.breakdown.penalty = penalty_;
  res.total_reward = res.breakdown.sparse + res.breakdown.dense + res.breakdown.penalty;
  res.termination = reason;
  res.final_position = state_.position;
  res.policy_queries = queries_;
  return res;
}

EpisodeResult run_episode(const TerrainMap& map, const Position& start, const Position& goal, LocalPolicy& policy,
                          const SimConfig& cfg, const EpisodeOptions& options) {
  if (!is_navigable(map, start)) throw PreconditionError("episode start is not navigable");
  if (!is_navigable(map, goal)) throw PreconditionError("episode goal is not navigable");
  policy.reset();
  EpisodeDriver driver(map, cfg, start, goal, options);
  if (driver.started_at_goal()) return driver.finish(Termination::reached);
  for (;;) {
    if (const auto t = driver.tick(policy, goal)) return driver.finish(*t);
    if (driver.ticks_without_progress() >= cfg.reward.no_progress_limit) return driver.finish(Termination::no_progress);
  }
}

}  // namespace gnav
