#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "plansafe/automaton.hpp"
#include "plansafe/environment.hpp"
#include "plansafe/formula.hpp"

namespace plansafe::decoding {

// A discrete probability distribution over whole action strings. Candidate
// sets always include the terminal DONE action.
struct WeightedAction {
  std::string action;
  double probability = 0.0;
};

// Normalized on construction: the inputs are non-negative weights (a
// policy's top candidates rarely carry the full probability mass) divided
// by their total, so stored probabilities lie in [0, 1] and sum to 1.
// Rejected: empty lists, duplicate actions, negative or non-finite
// weights, zero total mass.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<WeightedAction> entries);

  const std::vector<WeightedAction>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<WeightedAction> entries_;
};

// Removes the invalid actions and rescales the rest to sum to 1, preserving
// order. Throws a dead-end error when nothing remains.
ActionDistribution mask_and_renormalize(
    const ActionDistribution& d, const std::vector<std::string>& invalid);

// Everything a policy may look at when proposing the next action: the
// environment, the task, the actions taken so far, and the candidate set
// (applicable actions plus DONE, in that order).
struct PolicyContext {
  const env::Environment& environment;
  std::string_view task_text;
  const std::vector<std::string>& history;
  const env::AgentState& state;
  const std::vector<std::string>& candidates;
};

// A pluggable stochastic action source standing in for an autoregressive
// planner. Must return a distribution whose actions are a subset of
// ctx.candidates; the engine validates this. Queried once per step; the
// engine handles masking and renormalization locally.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual ActionDistribution propose(const PolicyContext& ctx) = 0;
};

// One action the engine rejected mid-step, with the probability the policy
// originally assigned to it.
struct MaskedAction {
  std::size_t step = 0;
  std::string action;
  double pre_mask_probability = 0.0;
};

// Single-owner mutable decoding state: tracks the agent, the monitor
// automaton state, the action history, and the seeded RNG. The automaton
// must be compiled in one-hot mode over the environment's propositions and
// is shared read-only.
//
// In constrained mode every committed action keeps the automaton state
// live (an action leading to a dead state, or DONE in a non-accepting
// state, is masked and the rest of the distribution renormalized); the
// emitted plan is therefore guaranteed safe. In unconstrained mode the
// automaton merely observes.
class DecodingSession {
 public:
  DecodingSession(const env::Environment& environment, std::string task_text,
                  const automaton::TraceAutomaton& monitor,
                  std::uint64_t seed, std::size_t max_steps,
                  bool constrained = true);

  bool finished() const { return finished_; }
  const std::vector<std::string>& history() const { return history_; }
  const std::vector<MaskedAction>& masked_log() const { return masked_; }
  const env::AgentState& agent_state() const { return state_; }
  automaton::TraceAutomaton::StateId automaton_state() const { return q_; }
  std::size_t max_steps() const { return max_steps_; }

  // Applicable actions plus DONE, the candidate set of the next step.
  std::vector<std::string> candidates() const;

  // Samples from the policy's distribution, masking invalid actions until a
  // valid one is committed. Returns the committed action (possibly DONE).
  // Throws: dead-end (all candidates masked), step-limit.
  std::string step(Policy& policy);

 private:
  bool action_valid(std::string_view action) const;

  const env::Environment& env_;
  const automaton::TraceAutomaton& monitor_;
  std::string task_text_;
  bool constrained_;
  std::size_t max_steps_;
  std::mt19937_64 rng_;
  env::AgentState state_;
  automaton::TraceAutomaton::StateId q_;
  std::vector<std::string> history_;
  std::vector<MaskedAction> masked_;
  bool finished_ = false;
};

// Default plan-length budget: 4 x (number of entities).
std::size_t default_max_steps(const env::Environment& environment);

// Compiles the spec over the environment's propositions (one-hot), checks
// satisfiability up front, and iterates `step` until DONE commits.
// Guarantee: evaluate(spec, simulate(env, plan).trace) is true for every
// returned plan. Throws: unsatisfiable spec (dead initial state),
// dead-end, step-limit.
env::Plan run(const env::Environment& environment, std::string_view task_text,
              const ltl::Formula& spec, Policy& policy, std::uint64_t seed,
              std::size_t max_steps = 0);

// Same loop without masking: the policy's samples are committed as long as
// they are applicable, whether or not they violate the spec. Baseline for
// measuring what constrained decoding buys.
env::Plan run_unconstrained(const env::Environment& environment,
                            std::string_view task_text,
                            const ltl::Formula& spec, Policy& policy,
                            std::uint64_t seed, std::size_t max_steps = 0);

}  // namespace plansafe::decoding
