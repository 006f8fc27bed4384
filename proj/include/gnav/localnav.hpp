#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "gnav/simkernel.hpp"

namespace gnav {

enum class PolicyKind { greedy_steer, scripted_fixture };

struct PolicySpec {
  PolicyKind kind = PolicyKind::greedy_steer;
  double obstacle_jump_threshold = 2.0;  // meters, central depth rows
  double turn_gain = 2.0;               // turn command per radian of bearing error
  int stuck_jump_after = 3;             // decisions without progress before jumping
  /// Action sequence replayed by scripted_fixture, one entry per decision (last entry repeats).
  std::vector<Action> script;

  void validate() const;
  bool operator==(const PolicySpec&) const = default;
};

std::string_view to_string(PolicyKind kind);

/// Point-goal navigator queried once per decision. Sees only the observation.
class LocalPolicy {
 public:
  virtual ~LocalPolicy() = default;
  virtual Action act(const Observation& obs) = 0;
  /// Clears per-episode (or per-waypoint) state.
  virtual void reset() = 0;
};

/// Steers toward the goal, jumps at close obstacles and when progress stalls.
class GreedySteerPolicy final : public LocalPolicy {
 public:
  explicit GreedySteerPolicy(const PolicySpec& spec) : spec_(spec) {}
  Action act(const Observation& obs) override;
  void reset() override;

 private:
  PolicySpec spec_;
  double best_dist_ = -1.0;
  int stalled_ = 0;
};

class ScriptedPolicy final : public LocalPolicy {
 public:
  explicit ScriptedPolicy(std::vector<Action> script) : script_(std::move(script)) {}
  Action act(const Observation& obs) override;
  void reset() override { next_ = 0; }

 private:
  std::vector<Action> script_;
  std::size_t next_ = 0;
};

std::unique_ptr<LocalPolicy> make_policy(const PolicySpec& spec);

/// Stateless entry point: a fresh controller acting on a single observation.
Action act(const Observation& obs, const PolicySpec& spec);

}  // namespace gnav
