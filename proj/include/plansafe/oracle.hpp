#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "plansafe/automaton.hpp"
#include "plansafe/environment.hpp"
#include "plansafe/formula.hpp"

namespace plansafe::oracle {

// All accepting plans up to the requested length, plus the limits the
// enumeration ran with so batch reports can echo them.
struct EnumerationResult {
  std::vector<env::Plan> plans;  // each ends with DONE
  bool truncated = false;        // plan_cap hit before the search finished
  std::size_t max_len = 0;       // actions per plan, DONE excluded
  std::size_t plan_cap = 0;
};

// Default search depth for enumeration: twice the entity count.
std::size_t default_max_len(const env::Environment& environment);

// Depth-first enumeration (action-vocabulary order) of every plan with at
// most max_len actions whose run ends in an accepting automaton state;
// transitions into dead states are pruned. Plans surface in discovery
// order: a prefix's DONE completion precedes its extensions. The automaton
// must be one-hot over the environment's propositions.
EnumerationResult enumerate_accepting_plans(
    const env::Environment& environment,
    const automaton::TraceAutomaton& monitor, std::size_t max_len,
    std::size_t plan_cap = 100000);

struct PlanResult {
  env::Plan plan;  // ends with DONE
  double cost = 0.0;
};

// Least-cost accepting plan via uniform-cost search over the product of
// environment states and automaton states; ties broken by fewer actions,
// then lexicographically earliest action sequence. Throws
// unsatisfiable_spec when no accepting product state is reachable.
// Manipulation instances are limited to 8 blocks (the moved-set state
// space is exponential in the block count).
PlanResult optimal_plan(const env::Environment& environment,
                        const automaton::TraceAutomaton& monitor);

// One dataset task: an environment, the natural-language command, and the
// specification the plan must satisfy.
struct OracleTask {
  std::string environment_file;  // echoed into the record
  const env::Environment* environment = nullptr;
  std::string nl;
  ltl::Formula spec;
};

struct ExportSkip {
  std::size_t index = 0;  // position in the input batch
  std::string reason;
};

struct ExportReport {
  std::size_t written = 0;
  std::vector<ExportSkip> skipped;
};

// Writes one JSON record per line: {"environment", "nl", "spec_prefix",
// "plan", "cost"} with the task's optimal plan. Tasks whose plan cannot be
// produced (unsatisfiable spec, oversized instance) are skipped and
// reported. Planning runs task-parallel; output order matches input order.
ExportReport export_training_pairs(const std::vector<OracleTask>& tasks,
                                   std::ostream& out);

}  // namespace plansafe::oracle
