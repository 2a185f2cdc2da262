#include "plansafe/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "plansafe/error.hpp"
#include "plansafe/rng.hpp"

namespace plansafe::decoding {

ActionDistribution::ActionDistribution(std::vector<WeightedAction> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorCode::generic, "action distribution must be non-empty");
  }
  std::set<std::string_view> seen;
  double sum = 0.0;
  for (const WeightedAction& e : entries_) {
    if (!(std::isfinite(e.probability) && e.probability >= 0.0)) {
      throw Error(ErrorCode::generic,
                  "action weight must be finite and >= 0 for: " + e.action);
    }
    if (!seen.insert(e.action).second) {
      throw Error(ErrorCode::generic,
                  "duplicate action in distribution: " + e.action);
    }
    sum += e.probability;
  }
  if (sum <= 0.0) {
    throw Error(ErrorCode::generic, "action weights sum to zero");
  }
  for (WeightedAction& e : entries_) e.probability /= sum;
}

ActionDistribution mask_and_renormalize(
    const ActionDistribution& d, const std::vector<std::string>& invalid) {
  std::vector<WeightedAction> kept;
  double sum = 0.0;
  for (const WeightedAction& e : d.entries()) {
    if (std::find(invalid.begin(), invalid.end(), e.action) !=
        invalid.end()) {
      continue;
    }
    kept.push_back(e);
    sum += e.probability;
  }
  if (kept.empty()) {
    throw Error(ErrorCode::dead_end, "all candidate actions are masked");
  }
  if (sum <= 0.0) {
    throw Error(ErrorCode::dead_end,
                "remaining candidate actions have zero probability");
  }
  for (WeightedAction& e : kept) e.probability /= sum;
  return ActionDistribution(std::move(kept));
}

DecodingSession::DecodingSession(const env::Environment& environment,
                                 std::string task_text,
                                 const automaton::TraceAutomaton& monitor,
                                 std::uint64_t seed, std::size_t max_steps,
                                 bool constrained)
    : env_(environment),
      monitor_(monitor),
      task_text_(std::move(task_text)),
      constrained_(constrained),
      max_steps_(max_steps == 0 ? default_max_steps(environment) : max_steps),
      rng_(seed),
      state_(environment.initial_state()),
      q_(monitor.initial_state()) {
  if (monitor_.mode() != automaton::AlphabetMode::one_hot ||
      monitor_.universe() != env_.propositions()) {
    throw Error(ErrorCode::generic,
                "monitor automaton must be one-hot over the environment's "
                "propositions");
  }
  if (constrained_ && monitor_.is_dead(q_)) {
    throw Error(ErrorCode::unsatisfiable_spec,
                "specification is unsatisfiable in this environment: the "
                "initial automaton state is dead");
  }
}

std::vector<std::string> DecodingSession::candidates() const {
  std::vector<std::string> out;
  for (const env::Action& a : env_.actions()) {
    if (env_.is_applicable(state_, a)) out.push_back(a.text);
  }
  out.emplace_back(env::kDoneToken);
  return out;
}

bool DecodingSession::action_valid(std::string_view action) const {
  if (!constrained_) return true;
  if (action == env::kDoneToken) return monitor_.is_accepting(q_);
  auto id = env_.find_action(action);
  if (!id || !env_.is_applicable(state_, env_.actions()[*id])) return false;
  const std::string& prop = env_.actions()[*id].proposition;
  const auto& universe = monitor_.universe();
  auto it = std::lower_bound(universe.begin(), universe.end(), prop);
  const auto label = static_cast<std::size_t>(it - universe.begin());
  return !monitor_.is_dead(monitor_.next_state(q_, label));
}

std::string DecodingSession::step(Policy& policy) {
  if (finished_) {
    throw Error(ErrorCode::generic, "decoding session already finished");
  }
  if (history_.size() >= max_steps_) {
    throw Error(ErrorCode::step_limit,
                "step limit (" + std::to_string(max_steps_) +
                    ") reached before the plan finished");
  }

  const std::vector<std::string> cands = candidates();
  PolicyContext ctx{env_, task_text_, history_, state_, cands};
  ActionDistribution dist = policy.propose(ctx);
  for (const WeightedAction& e : dist.entries()) {
    if (std::find(cands.begin(), cands.end(), e.action) == cands.end()) {
      throw Error(ErrorCode::invalid_action,
                  "policy proposed a non-candidate action: " + e.action);
    }
  }
  // Pre-mask probabilities, for the masked-action log.
  const ActionDistribution original = dist;

  for (;;) {
    const double u = unit_real(rng_);
    double cum = 0.0;
    const std::vector<WeightedAction>& entries = dist.entries();
    std::size_t chosen = entries.size() - 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      cum += entries[i].probability;
      if (u < cum) {
        chosen = i;
        break;
      }
    }
    const std::string action = entries[chosen].action;

    if (!action_valid(action)) {
      double pre_mask = 0.0;
      for (const WeightedAction& e : original.entries()) {
        if (e.action == action) pre_mask = e.probability;
      }
      masked_.push_back(MaskedAction{history_.size(), action, pre_mask});
      dist = mask_and_renormalize(dist, {action});
      continue;
    }

    if (action == env::kDoneToken) {
      finished_ = true;
      history_.emplace_back(env::kDoneToken);
    } else {
      const env::ApplyResult result = env_.apply(state_, action);
      state_ = result.next;
      const auto& universe = monitor_.universe();
      auto it = std::lower_bound(universe.begin(), universe.end(),
                                 result.proposition);
      q_ = monitor_.next_state(
          q_, static_cast<std::size_t>(it - universe.begin()));
      history_.push_back(action);
    }
    return action;
  }
}

std::size_t default_max_steps(const env::Environment& environment) {
  const std::size_t entities = environment.landmarks().size() +
                               environment.blocks().size() +
                               environment.boxes().size();
  return 4 * entities;
}

namespace {

env::Plan run_session(const env::Environment& environment,
                      std::string_view task_text, const ltl::Formula& spec,
                      Policy& policy, std::uint64_t seed,
                      std::size_t max_steps, bool constrained) {
  const automaton::TraceAutomaton monitor = automaton::compile(
      spec, environment.propositions(), automaton::AlphabetMode::one_hot);
  DecodingSession session(environment, std::string(task_text), monitor, seed,
                          max_steps, constrained);
  while (!session.finished()) {
    session.step(policy);
  }
  return session.history();
}

}  // namespace

env::Plan run(const env::Environment& environment, std::string_view task_text,
              const ltl::Formula& spec, Policy& policy, std::uint64_t seed,
              std::size_t max_steps) {
  return run_session(environment, task_text, spec, policy, seed, max_steps,
                     /*constrained=*/true);
}

env::Plan run_unconstrained(const env::Environment& environment,
                            std::string_view task_text,
                            const ltl::Formula& spec, Policy& policy,
                            std::uint64_t seed, std::size_t max_steps) {
  return run_session(environment, task_text, spec, policy, seed, max_steps,
                     /*constrained=*/false);
}

}  // namespace plansafe::decoding
