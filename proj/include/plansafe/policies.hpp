#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "plansafe/decoding.hpp"

namespace plansafe::decoding {

// Equal probability over all candidates.
class UniformPolicy : public Policy {
 public:
  std::string_view name() const override { return "uniform"; }
  ActionDistribution propose(const PolicyContext& ctx) override;
};

// Weighs each action inversely to its travel cost from the agent's current
// position (manipulation: the two-leg reach), with a small constant weight
// on DONE. A cheap stand-in for a planner that prefers efficient plans.
class GreedyNearestPolicy : public Policy {
 public:
  explicit GreedyNearestPolicy(double done_weight = 0.05)
      : done_weight_(done_weight) {}

  std::string_view name() const override { return "greedy-nearest"; }
  ActionDistribution propose(const PolicyContext& ctx) override;

 private:
  double done_weight_;
};

// Plays back a fixed table: row i is the (unnormalized) weight row proposed
// when i actions have been committed; past the table it falls back to
// uniform. Rows may mention non-candidate actions only at zero weight.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<std::vector<WeightedAction>> rows);
  // Deterministic action sequence: one certain action per step.
  explicit ScriptedPolicy(const std::vector<std::string>& actions);

  std::string_view name() const override { return "scripted"; }
  ActionDistribution propose(const PolicyContext& ctx) override;

 private:
  std::vector<std::vector<WeightedAction>> rows_;
};

// Drives an external process over a line-delimited JSON protocol
// (documented in docs/FORMATS.md): one request line per proposal carrying
// the environment description, task, history, and candidates; the process
// answers with one line of {action, weight} pairs, which the engine
// normalizes. The hook for attaching a real language-model planner.
// Requests are serialized; the child lives for the lifetime of the policy.
class SubprocessPolicy : public Policy {
 public:
  explicit SubprocessPolicy(std::vector<std::string> command);
  ~SubprocessPolicy() override;

  SubprocessPolicy(const SubprocessPolicy&) = delete;
  SubprocessPolicy& operator=(const SubprocessPolicy&) = delete;

  std::string_view name() const override { return "subprocess"; }
  ActionDistribution propose(const PolicyContext& ctx) override;

 private:
  void start();
  void shutdown() noexcept;

  std::vector<std::string> command_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  std::FILE* from_child_ = nullptr;
};

// Normalizes non-negative weights into an ActionDistribution.
ActionDistribution normalize_weights(std::vector<WeightedAction> weights);

}  // namespace plansafe::decoding
