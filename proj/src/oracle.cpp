#include "plansafe/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"
#include "plansafe/error.hpp"
#include "plansafe/parallel.hpp"
#include "plansafe/parser.hpp"

namespace plansafe::oracle {

namespace {

using automaton::TraceAutomaton;
using StateId = TraceAutomaton::StateId;
using env::Environment;

void validate_monitor(const Environment& environment,
                      const TraceAutomaton& monitor) {
  if (monitor.mode() != automaton::AlphabetMode::one_hot ||
      monitor.universe() != environment.propositions()) {
    throw Error(ErrorCode::generic,
                "planning needs a one-hot automaton over the environment's "
                "propositions");
  }
}

std::size_t label_of(const TraceAutomaton& monitor,
                     const std::string& proposition) {
  const auto& universe = monitor.universe();
  auto it =
      std::lower_bound(universe.begin(), universe.end(), proposition);
  return static_cast<std::size_t>(it - universe.begin());
}

void enumerate_from(const Environment& environment,
                    const TraceAutomaton& monitor,
                    const env::AgentState& state, StateId q, env::Plan& plan,
                    EnumerationResult& result) {
  if (result.truncated) return;
  if (monitor.is_accepting(q)) {
    env::Plan complete = plan;
    complete.push_back(std::string(env::kDoneToken));
    result.plans.push_back(std::move(complete));
    if (result.plans.size() >= result.plan_cap) {
      result.truncated = true;
      return;
    }
  }
  if (plan.size() >= result.max_len) return;
  for (const env::Action& action : environment.actions()) {
    if (!environment.is_applicable(state, action)) continue;
    StateId next_q = monitor.next_state(q, label_of(monitor, action.proposition));
    if (monitor.is_dead(next_q)) continue;
    env::ApplyResult applied = environment.apply(state, action);
    plan.push_back(action.text);
    enumerate_from(environment, monitor, applied.next, next_q, plan, result);
    plan.pop_back();
    if (result.truncated) return;
  }
}

// Product search bookkeeping: nodes are immutable once pushed, so frontier
// comparisons may follow parent chains safely.
struct SearchNode {
  env::AgentState state;
  StateId q = 0;
  double cost = 0.0;
  std::uint32_t length = 0;
  std::int32_t parent = -1;
  std::int32_t action = -1;  // index into environment.actions()
};

env::Plan reconstruct(const std::vector<SearchNode>& nodes,
                      const Environment& environment, std::size_t leaf) {
  env::Plan plan;
  for (std::int32_t at = static_cast<std::int32_t>(leaf); at >= 0;
       at = nodes[static_cast<std::size_t>(at)].parent) {
    const SearchNode& node = nodes[static_cast<std::size_t>(at)];
    if (node.action >= 0) {
      plan.push_back(
          environment.actions()[static_cast<std::size_t>(node.action)].text);
    }
  }
  std::reverse(plan.begin(), plan.end());
  plan.push_back(std::string(env::kDoneToken));
  return plan;
}

// Action-index sequence along the parent chain, root first.
std::vector<std::int32_t> path_actions(const std::vector<SearchNode>& nodes,
                                       std::size_t leaf) {
  std::vector<std::int32_t> actions;
  for (std::int32_t at = static_cast<std::int32_t>(leaf); at >= 0;
       at = nodes[static_cast<std::size_t>(at)].parent) {
    const SearchNode& node = nodes[static_cast<std::size_t>(at)];
    if (node.action >= 0) actions.push_back(node.action);
  }
  std::reverse(actions.begin(), actions.end());
  return actions;
}

// Frontier order realizes the optimality tie rules: cost, then fewer
// actions, then lexicographically earliest action sequence (environment
// actions are sorted by text, so index order is text order).
struct FrontierLess {
  const std::vector<SearchNode>* nodes;

  bool operator()(std::size_t a, std::size_t b) const {
    const SearchNode& na = (*nodes)[a];
    const SearchNode& nb = (*nodes)[b];
    if (na.cost != nb.cost) return na.cost < nb.cost;
    if (na.length != nb.length) return na.length < nb.length;
    if (a == b) return false;
    return path_actions(*nodes, a) < path_actions(*nodes, b);
  }
};

}  // namespace

std::size_t default_max_len(const env::Environment& environment) {
  const std::size_t entities = environment.landmarks().size() +
                               environment.blocks().size() +
                               environment.boxes().size();
  return 2 * entities;
}

EnumerationResult enumerate_accepting_plans(const Environment& environment,
                                            const TraceAutomaton& monitor,
                                            std::size_t max_len,
                                            std::size_t plan_cap) {
  validate_monitor(environment, monitor);
  if (max_len < 1) {
    throw Error(ErrorCode::generic, "enumeration needs max_len >= 1");
  }
  if (plan_cap < 1) {
    throw Error(ErrorCode::generic, "enumeration needs plan_cap >= 1");
  }
  EnumerationResult result;
  result.max_len = max_len;
  result.plan_cap = plan_cap;
  StateId q0 = monitor.initial_state();
  if (!monitor.is_dead(q0)) {
    env::Plan plan;
    enumerate_from(environment, monitor, environment.initial_state(), q0,
                   plan, result);
  }
  return result;
}

PlanResult optimal_plan(const Environment& environment,
                        const TraceAutomaton& monitor) {
  validate_monitor(environment, monitor);
  if (environment.kind() == env::DomainKind::manipulation &&
      environment.blocks().size() > 8) {
    throw Error(ErrorCode::generic,
                "optimal planning is limited to 8 blocks; this instance has " +
                    std::to_string(environment.blocks().size()));
  }

  StateId q0 = monitor.initial_state();
  if (monitor.is_dead(q0)) {
    throw Error(ErrorCode::unsatisfiable_spec,
                "no accepting plan exists: the specification is dead at the "
                "initial state");
  }

  std::vector<SearchNode> nodes;
  nodes.push_back(
      SearchNode{environment.initial_state(), q0, 0.0, 0, -1, -1});

  std::set<std::size_t, FrontierLess> frontier{FrontierLess{&nodes}};
  frontier.insert(0);
  std::map<std::pair<std::uint64_t, StateId>, bool> settled;

  while (!frontier.empty()) {
    std::size_t index = *frontier.begin();
    frontier.erase(frontier.begin());
    SearchNode node = nodes[index];

    auto key = std::make_pair(node.state.key(), node.q);
    if (!settled.emplace(key, true).second) continue;

    if (monitor.is_accepting(node.q)) {
      return PlanResult{reconstruct(nodes, environment, index), node.cost};
    }

    const auto& actions = environment.actions();
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (!environment.is_applicable(node.state, actions[a])) continue;
      StateId next_q =
          monitor.next_state(node.q, label_of(monitor, actions[a].proposition));
      if (monitor.is_dead(next_q)) continue;
      env::ApplyResult applied = environment.apply(node.state, actions[a]);
      if (settled.count(std::make_pair(applied.next.key(), next_q))) {
        continue;
      }
      nodes.push_back(SearchNode{applied.next, next_q,
                                 node.cost + applied.cost, node.length + 1,
                                 static_cast<std::int32_t>(index),
                                 static_cast<std::int32_t>(a)});
      frontier.insert(nodes.size() - 1);
    }
  }
  throw Error(ErrorCode::unsatisfiable_spec,
              "no accepting plan exists: the reachable product is "
              "accepting-free");
}

ExportReport export_training_pairs(const std::vector<OracleTask>& tasks,
                                   std::ostream& out) {
  struct Slot {
    bool ok = false;
    std::string line;    // serialized record
    std::string reason;  // failure, when !ok
  };
  std::vector<Slot> slots(tasks.size());

  for_each_index(tasks.size(), [&](std::size_t i) {
    const OracleTask& task = tasks[i];
    try {
      const TraceAutomaton monitor =
          automaton::compile(task.spec, task.environment->propositions(),
                             automaton::AlphabetMode::one_hot);
      PlanResult best = optimal_plan(*task.environment, monitor);
      nlohmann::ordered_json record;
      record["environment"] = task.environment_file;
      record["nl"] = task.nl;
      record["spec_prefix"] = ltl::render_prefix(task.spec);
      record["plan"] = best.plan;
      record["cost"] = best.cost;
      slots[i].ok = true;
      slots[i].line = record.dump();
    } catch (const Error& e) {
      slots[i].reason = e.what();
    }
  });

  ExportReport report;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].ok) {
      out << slots[i].line << "\n";
      ++report.written;
    } else {
      report.skipped.push_back(ExportSkip{i, slots[i].reason});
    }
  }
  return report;
}

}  // namespace plansafe::oracle
