#include "gnav/localnav.hpp"

#include <algorithm>
#include <cmath>

#include "gnav/errors.hpp"

namespace gnav {

void PolicySpec::validate() const {
  if (!(obstacle_jump_threshold > 0.0)) throw ConfigError("policy.obstacle_jump_threshold must be positive");
  if (!(turn_gain > 0.0)) throw ConfigError("policy.turn_gain must be positive");
  if (stuck_jump_after <= 0) throw ConfigError("policy.stuck_jump_after must be positive");
  if (kind == PolicyKind::scripted_fixture && script.empty())
    throw ConfigError("policy.script must be non-empty for scripted_fixture");
}

std::string_view to_string(PolicyKind kind) {
  return kind == PolicyKind::greedy_steer ? "greedy_steer" : "scripted_fixture";
}

Action GreedySteerPolicy::act(const Observation& obs) {
  const Vec3& g = obs.goal_relative;
  const double bearing = std::atan2(g.x, g.z);
  const double planar = std::hypot(g.x, g.z);

  Action a;
  a.turn = std::clamp(spec_.turn_gain * bearing, -1.0, 1.0);
  constexpr double kFacing = deg_to_rad(20.0);
  a.forward = std::abs(bearing) < kFacing ? 1.0 : std::max(0.0, std::cos(bearing));

  if (best_dist_ < 0.0 || planar < best_dist_ - 0.05) {
    best_dist_ = planar;
    stalled_ = 0;
  } else {
    ++stalled_;
  }

  // Central two rows and columns look straight ahead.
  constexpr int kMid = Observation::kRows / 2;
  double ahead = obs.depth_at(kMid - 1, kMid - 1);
  for (int r = kMid - 1; r <= kMid; ++r)
    for (int c = kMid - 1; c <= kMid; ++c) ahead = std::min(ahead, obs.depth_at(r, c));
  const bool blocked = ahead < spec_.obstacle_jump_threshold && ahead < planar;
  if (blocked || stalled_ >= spec_.stuck_jump_after) a.jump = 1.0;
  return a;
}

void GreedySteerPolicy::reset() {
  best_dist_ = -1.0;
  stalled_ = 0;
}

Action ScriptedPolicy::act(const Observation&) {
  if (script_.empty()) return {};
  const Action a = script_[std::min(next_, script_.size() - 1)];
  ++next_;
  return a;
}

std::unique_ptr<LocalPolicy> make_policy(const PolicySpec& spec) {
  if (spec.kind == PolicyKind::scripted_fixture) return std::make_unique<ScriptedPolicy>(spec.script);
  return std::make_unique<GreedySteerPolicy>(spec);
}

Action act(const Observation& obs, const PolicySpec& spec) { return make_policy(spec)->act(obs); }

}  // namespace gnav
