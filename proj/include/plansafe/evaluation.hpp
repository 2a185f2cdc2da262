#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plansafe/datagen.hpp"
#include "plansafe/decoding.hpp"
#include "plansafe/environment.hpp"
#include "plansafe/error.hpp"

namespace plansafe::evaluation {

enum class PlannerKind {
  constrained,    // policy sampling with safety masking
  unconstrained,  // the same policy, no masking (baseline)
  oracle          // uniform-cost product search
};

const char* planner_kind_name(PlannerKind k) noexcept;
std::optional<PlannerKind> planner_kind_from_name(std::string_view name);

// Fresh policy per task so tasks stay isolated (stateful policies such as
// subprocess-backed ones must not be shared across tasks).
using PolicyFactory =
    std::function<std::unique_ptr<decoding::Policy>()>;

struct EvaluationConfig {
  PlannerKind planner = PlannerKind::oracle;
  // Per-task budget in seconds; a task that overruns it counts as a
  // timeout failure even when a plan came back.
  double time_limit_seconds = 300.0;
  std::uint64_t seed = 0;  // per-task sampling seeds derive from this
  bool serial = false;     // run the serial reference loop
};

// What happened on one corpus record.
struct TaskOutcome {
  bool planned = false;     // the planner returned a plan in time
  bool safe = false;        // plan trace satisfies the full specification
  bool completed = false;   // plan trace satisfies the goal conjunct alone
  double cost = 0.0;        // simulated execution cost (time-steps)
  double planning_seconds = 0.0;  // compile + planning wall time
  std::optional<ErrorCode> failure;  // taxonomy key when the task failed
  env::Plan plan;
};

// One aggregate line: overall or per constraint count.
struct MetricRow {
  std::size_t tasks = 0;
  std::size_t safe_count = 0;
  std::size_t completed_count = 0;
  double sf = 0.0;  // percent of tasks with a safe plan
  double cp = 0.0;  // percent of tasks completing the goal conjunct
  double et = 0.0;  // mean execution cost over SAFE plans only
  double pt = 0.0;  // mean planning wall seconds over all tasks
};

struct EvaluationReport {
  PlannerKind planner = PlannerKind::oracle;
  double time_limit_seconds = 0.0;
  MetricRow overall;
  std::map<std::size_t, MetricRow> by_constraint_count;
  std::map<ErrorCode, std::size_t> failures;
  std::vector<TaskOutcome> outcomes;  // corpus order
};

// Runs the chosen planner on every record; per-task errors land in the
// failure taxonomy and never abort the batch. Safety and completion are
// judged by the semantic trace evaluator, never by the automaton that
// guided decoding. The goal conjunct is the left conjunct of the record's
// specification (the whole formula when it has no constraints).
// policy_factory defaults to the uniform policy and is ignored by the
// oracle planner. Invariants: SF <= CP <= 100; ET averages safe plans
// only; timeouts count as failures.
EvaluationReport evaluate(const datagen::Corpus& corpus,
                          const EvaluationConfig& config,
                          const PolicyFactory& policy_factory = {});

// Fixed-width human-readable table.
std::string render_report(const EvaluationReport& report);

// Machine-readable JSON (single line). Wall-time fields are reported but
// are the only non-deterministic part of the report.
std::string report_to_json(const EvaluationReport& report);

}  // namespace plansafe::evaluation
