#include "plansafe/evaluation.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "plansafe/automaton.hpp"
#include "plansafe/oracle.hpp"
#include "plansafe/parallel.hpp"
#include "plansafe/policies.hpp"
#include "plansafe/rng.hpp"
#include "plansafe/trace.hpp"

namespace plansafe::evaluation {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ltl::Formula goal_conjunct(const ltl::Formula& spec,
                           std::size_t n_constraints) {
  if (n_constraints > 0 && spec.is(ltl::Op::And)) return spec.left();
  return spec;
}

env::Plan plan_task(const env::Environment& environment,
                    const datagen::TaskRecord& record,
                    const ltl::Formula& spec, const EvaluationConfig& config,
                    const PolicyFactory& policy_factory,
                    std::uint64_t task_seed) {
  switch (config.planner) {
    case PlannerKind::oracle: {
      automaton::TraceAutomaton monitor =
          automaton::compile(spec, environment.propositions(),
                             automaton::AlphabetMode::one_hot);
      return oracle::optimal_plan(environment, monitor).plan;
    }
    case PlannerKind::constrained: {
      std::unique_ptr<decoding::Policy> policy = policy_factory();
      return decoding::run(environment, record.nl, spec, *policy, task_seed);
    }
    case PlannerKind::unconstrained: {
      std::unique_ptr<decoding::Policy> policy = policy_factory();
      return decoding::run_unconstrained(environment, record.nl, spec,
                                         *policy, task_seed);
    }
  }
  throw Error(ErrorCode::generic, "unknown planner kind");
}

TaskOutcome run_task(const datagen::Corpus& corpus, std::size_t index,
                     const EvaluationConfig& config,
                     const PolicyFactory& policy_factory) {
  const datagen::TaskRecord& record = corpus.records[index];
  const env::Environment& environment =
      corpus.environments[record.environment_id];
  ltl::Formula spec = datagen::grounded_spec(record);
  ltl::Formula goal = goal_conjunct(spec, record.n_constraints);

  TaskOutcome outcome;
  Clock::time_point start = Clock::now();
  try {
    env::Plan plan = plan_task(environment, record, spec, config,
                               policy_factory,
                               mix_seed(config.seed, index));
    outcome.planning_seconds = seconds_since(start);
    outcome.planned = true;
    outcome.plan = std::move(plan);
    env::SimulationResult sim = env::simulate(environment, outcome.plan);
    outcome.safe = ltl::evaluate(spec, sim.trace);
    outcome.completed = ltl::evaluate(goal, sim.trace);
    outcome.cost = sim.total_cost;
  } catch (const Error& e) {
    outcome.planning_seconds = seconds_since(start);
    outcome.failure = e.code();
  }

  // No preemption inside a task: the budget is enforced on the measured
  // wall time, and an overrun invalidates the plan for every metric.
  if (outcome.planning_seconds > config.time_limit_seconds) {
    outcome.planned = false;
    outcome.safe = false;
    outcome.completed = false;
    outcome.failure = ErrorCode::timeout;
  }
  return outcome;
}

void finish_row(MetricRow& row, double safe_cost_total,
                double planning_total) {
  if (row.tasks == 0) return;
  const double n = static_cast<double>(row.tasks);
  row.sf = 100.0 * static_cast<double>(row.safe_count) / n;
  row.cp = 100.0 * static_cast<double>(row.completed_count) / n;
  row.et = row.safe_count == 0
               ? 0.0
               : safe_cost_total / static_cast<double>(row.safe_count);
  row.pt = planning_total / n;
}

void append_row(std::ostringstream& out, const std::string& label,
                const MetricRow& row) {
  out << "  " << std::left << std::setw(8) << label << std::right
      << std::setw(6) << row.tasks << std::fixed << std::setprecision(1)
      << std::setw(8) << row.sf << std::setw(8) << row.cp
      << std::setprecision(2) << std::setw(10) << row.et
      << std::setprecision(4) << std::setw(10) << row.pt << "\n";
}

nlohmann::ordered_json row_to_json(const MetricRow& row) {
  nlohmann::ordered_json j;
  j["tasks"] = row.tasks;
  j["safe"] = row.safe_count;
  j["completed"] = row.completed_count;
  j["sf"] = row.sf;
  j["cp"] = row.cp;
  j["et"] = row.et;
  j["pt"] = row.pt;
  return j;
}

}  // namespace

const char* planner_kind_name(PlannerKind k) noexcept {
  switch (k) {
    case PlannerKind::constrained:
      return "constrained";
    case PlannerKind::unconstrained:
      return "unconstrained";
    case PlannerKind::oracle:
      return "oracle";
  }
  return "unknown";
}

std::optional<PlannerKind> planner_kind_from_name(std::string_view name) {
  for (PlannerKind k : {PlannerKind::constrained, PlannerKind::unconstrained,
                        PlannerKind::oracle}) {
    if (name == planner_kind_name(k)) return k;
  }
  return std::nullopt;
}

EvaluationReport evaluate(const datagen::Corpus& corpus,
                          const EvaluationConfig& config,
                          const PolicyFactory& policy_factory) {
  if (corpus.records.empty()) {
    throw Error(ErrorCode::generic, "evaluation needs at least one record");
  }
  if (!(config.time_limit_seconds > 0.0)) {
    throw Error(ErrorCode::generic, "time limit must be positive");
  }
  for (const datagen::TaskRecord& record : corpus.records) {
    if (record.environment_id >= corpus.environments.size()) {
      throw Error(ErrorCode::generic,
                  "record points at a missing environment: " +
                      std::to_string(record.environment_id));
    }
  }
  PolicyFactory factory = policy_factory;
  if (!factory) {
    factory = [] {
      return std::make_unique<decoding::UniformPolicy>();
    };
  }

  EvaluationReport report;
  report.planner = config.planner;
  report.time_limit_seconds = config.time_limit_seconds;
  report.outcomes.resize(corpus.records.size());

  const std::function<void(std::size_t)> body = [&](std::size_t i) {
    report.outcomes[i] = run_task(corpus, i, config, factory);
  };
  if (config.serial) {
    for_each_index_serial(corpus.records.size(), body);
  } else {
    for_each_index(corpus.records.size(), body);
  }

  // Deterministic ordered reduction over the per-task slots.
  double safe_cost_total = 0.0;
  double planning_total = 0.0;
  std::map<std::size_t, double> group_safe_cost;
  std::map<std::size_t, double> group_planning;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const TaskOutcome& outcome = report.outcomes[i];
    const std::size_t n = corpus.records[i].n_constraints;
    MetricRow& group = report.by_constraint_count[n];
    ++report.overall.tasks;
    ++group.tasks;
    if (outcome.safe) {
      ++report.overall.safe_count;
      ++group.safe_count;
      safe_cost_total += outcome.cost;
      group_safe_cost[n] += outcome.cost;
    }
    if (outcome.completed) {
      ++report.overall.completed_count;
      ++group.completed_count;
    }
    planning_total += outcome.planning_seconds;
    group_planning[n] += outcome.planning_seconds;
    if (outcome.failure) ++report.failures[*outcome.failure];
  }
  finish_row(report.overall, safe_cost_total, planning_total);
  for (auto& [n, row] : report.by_constraint_count) {
    finish_row(row, group_safe_cost[n], group_planning[n]);
  }
  return report;
}

std::string render_report(const EvaluationReport& report) {
  std::ostringstream out;
  out << "planner: " << planner_kind_name(report.planner)
      << "   tasks: " << report.overall.tasks << "   time limit: "
      << std::fixed << std::setprecision(0) << report.time_limit_seconds
      << " s per task\n";
  out << std::fixed << std::setprecision(1);
  out << "SF  " << report.overall.sf << "%  (" << report.overall.safe_count
      << " safe)\n";
  out << "CP  " << report.overall.cp << "%  ("
      << report.overall.completed_count << " completed)\n";
  out << std::setprecision(2);
  out << "ET  " << report.overall.et << " time-steps (mean over safe plans)\n";
  out << std::setprecision(4);
  out << "PT  " << report.overall.pt << " s (mean planning wall time)\n";

  out << "by constraint count:\n";
  out << "  n       tasks      SF      CP        ET        PT\n";
  for (const auto& [n, row] : report.by_constraint_count) {
    append_row(out, std::to_string(n), row);
  }

  out << "failures:\n";
  if (report.failures.empty()) {
    out << "  none\n";
  } else {
    for (const auto& [code, count] : report.failures) {
      out << "  " << error_code_name(code) << ": " << count << "\n";
    }
  }
  return out.str();
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["planner"] = planner_kind_name(report.planner);
  j["time_limit_seconds"] = report.time_limit_seconds;
  j["overall"] = row_to_json(report.overall);
  nlohmann::ordered_json groups = nlohmann::ordered_json::object();
  for (const auto& [n, row] : report.by_constraint_count) {
    groups[std::to_string(n)] = row_to_json(row);
  }
  j["by_constraint_count"] = std::move(groups);
  nlohmann::ordered_json failures = nlohmann::ordered_json::object();
  for (const auto& [code, count] : report.failures) {
    failures[error_code_name(code)] = count;
  }
  j["failures"] = std::move(failures);
  return j.dump();
}

}  // namespace plansafe::evaluation
