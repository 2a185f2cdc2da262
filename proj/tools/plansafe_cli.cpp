// plansafe: command-line front end for the plan-safety toolkit.
//
// Commands: parse | compile | check-equiv | vote | plan | oracle-plan |
//           gen-corpus | export-pairs | evaluate | stats
// Input and output formats are documented in docs/FORMATS.md.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plansafe/automaton.hpp"
#include "plansafe/datagen.hpp"
#include "plansafe/environment.hpp"
#include "plansafe/error.hpp"
#include "plansafe/evaluation.hpp"
#include "plansafe/oracle.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/policies.hpp"
#include "plansafe/simplify.hpp"
#include "plansafe/voting.hpp"

namespace {

using namespace plansafe;
using ltl::Formula;

constexpr const char* kDocsPointer =
    "see docs/FORMATS.md for the input and output formats";

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string format = "infix";
  std::string alphabet = "full";
  std::size_t state_cap = automaton::TraceAutomaton::kDefaultStateCap;
  double time_limit = 300.0;
};

std::string render(const Formula& f, const GlobalOptions& global) {
  return global.format == "prefix" ? ltl::render_prefix(f)
                                   : ltl::render_infix(f);
}

automaton::AlphabetMode alphabet_mode(const GlobalOptions& global) {
  auto mode = automaton::alphabet_mode_from_name(global.alphabet);
  if (!mode) {
    throw Error(ErrorCode::generic,
                "unknown alphabet mode: " + global.alphabet);
  }
  return *mode;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot read file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot read file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

// --spec takes the formula inline; --spec-file reads it from a file.
Formula spec_from_options(const std::string& spec_text,
                          const std::string& spec_file) {
  if (spec_text.empty() && spec_file.empty()) {
    throw Error(ErrorCode::generic,
                std::string("a specification is required: pass --spec or "
                            "--spec-file; ") +
                    kDocsPointer);
  }
  if (!spec_text.empty() && !spec_file.empty()) {
    throw Error(ErrorCode::generic,
                "--spec and --spec-file are mutually exclusive");
  }
  std::string text = spec_text.empty() ? read_text_file(spec_file)
                                       : spec_text;
  return ltl::parse_formula(trim(text));
}

// Policy designators: "uniform", "greedy", "scripted:<file>" (one action
// per line), "subprocess:<shell command>".
std::unique_ptr<decoding::Policy> make_policy(const std::string& designator) {
  if (designator == "uniform") {
    return std::make_unique<decoding::UniformPolicy>();
  }
  if (designator == "greedy") {
    return std::make_unique<decoding::GreedyNearestPolicy>();
  }
  if (designator.rfind("scripted:", 0) == 0) {
    return std::make_unique<decoding::ScriptedPolicy>(
        read_lines(designator.substr(9)));
  }
  if (designator.rfind("subprocess:", 0) == 0) {
    return std::make_unique<decoding::SubprocessPolicy>(
        std::vector<std::string>{"/bin/sh", "-c", designator.substr(11)});
  }
  throw Error(ErrorCode::generic,
              std::string("unknown policy: ") + designator + "; " +
                  kDocsPointer);
}

void print_plan(const env::Plan& plan, double cost) {
  for (const std::string& action : plan) {
    std::cout << action << "\n";
  }
  std::cout << "cost: " << cost << "\n";
}

std::size_t phrase_collisions(const datagen::Corpus& corpus) {
  std::map<std::string, std::set<std::string>> by_phrase;
  for (const datagen::TaskRecord& record : corpus.records) {
    by_phrase[record.nl].insert(
        ltl::render_prefix(datagen::grounded_spec(record)));
  }
  std::size_t collisions = 0;
  for (const auto& [phrase, formulas] : by_phrase) {
    if (formulas.size() > 1) collisions += formulas.size() - 1;
  }
  return collisions;
}

// ---- subcommand bodies ----------------------------------------------------

int run_parse(const std::vector<std::string>& formulas, bool canonical,
              const GlobalOptions& global) {
  for (const std::string& text : formulas) {
    Formula f = ltl::parse_formula(text);
    if (canonical) f = ltl::canonicalize(f);
    std::cout << render(f, global) << "\n";
  }
  return 0;
}

int run_compile(const std::string& formula_text,
                const std::string& universe_csv, bool dot,
                const GlobalOptions& global) {
  Formula f = ltl::parse_formula(formula_text);
  std::vector<std::string> universe = universe_csv.empty()
                                          ? f.atoms()
                                          : split_csv(universe_csv);
  automaton::TraceAutomaton a = automaton::compile(
      f, universe, alphabet_mode(global), global.state_cap);
  std::cout << (dot ? a.to_dot() : a.dump());
  return 0;
}

int run_check_equiv(const std::string& lhs_text, const std::string& rhs_text,
                    const std::string& universe_csv,
                    const GlobalOptions& global) {
  Formula lhs = ltl::parse_formula(lhs_text);
  Formula rhs = ltl::parse_formula(rhs_text);
  std::vector<std::string> universe;
  if (universe_csv.empty()) {
    std::set<std::string> atoms;
    for (const std::string& a : lhs.atoms()) atoms.insert(a);
    for (const std::string& a : rhs.atoms()) atoms.insert(a);
    universe.assign(atoms.begin(), atoms.end());
  } else {
    universe = split_csv(universe_csv);
  }
  automaton::EquivalenceResult result = automaton::check_equivalence(
      lhs, rhs, universe, alphabet_mode(global), global.state_cap);
  if (result.equivalent) {
    std::cout << "equivalent\n";
  } else {
    std::cout << "inequivalent\n";
    if (result.witness) {
      std::cout << "witness: " << result.witness->to_string() << "\n";
    }
  }
  return 0;
}

int run_vote(const std::vector<std::string>& candidates,
             const std::string& file, const GlobalOptions& global) {
  voting::VoteResult result;
  if (!file.empty()) {
    // File lines are machine output: unparseable lines are dropped.
    result = voting::vote_lines(read_lines(file));
  } else {
    if (candidates.empty()) {
      throw Error(ErrorCode::generic,
                  std::string("vote needs candidate formulas (positional "
                              "arguments or --file); ") +
                      kDocsPointer);
    }
    std::vector<Formula> parsed;
    for (const std::string& text : candidates) {
      parsed.push_back(ltl::parse_formula(text));
    }
    result = voting::vote(parsed);
  }
  std::cout << "winner: " << render(result.representative, global) << "\n";
  std::cout << "group sizes:";
  for (std::size_t size : result.group_sizes()) std::cout << " " << size;
  std::cout << "\n";
  std::cout << "tie: " << (result.tie ? "yes" : "no") << "\n";
  std::cout << "dropped: " << result.dropped << "\n";
  return 0;
}

int run_plan(const std::string& spec_text, const std::string& spec_file,
             const std::string& env_path, const std::string& policy_name,
             std::size_t max_steps, bool unconstrained,
             const GlobalOptions& global) {
  Formula spec = spec_from_options(spec_text, spec_file);
  env::Environment environment = env::load_environment(env_path);
  std::unique_ptr<decoding::Policy> policy = make_policy(policy_name);
  env::Plan plan =
      unconstrained
          ? decoding::run_unconstrained(environment, "", spec, *policy,
                                        global.seed, max_steps)
          : decoding::run(environment, "", spec, *policy, global.seed,
                          max_steps);
  print_plan(plan, env::simulate(environment, plan).total_cost);
  return 0;
}

int run_oracle_plan(const std::string& spec_text,
                    const std::string& spec_file,
                    const std::string& env_path,
                    const GlobalOptions& global) {
  Formula spec = spec_from_options(spec_text, spec_file);
  env::Environment environment = env::load_environment(env_path);
  automaton::TraceAutomaton monitor =
      automaton::compile(spec, environment.propositions(),
                         automaton::AlphabetMode::one_hot, global.state_cap);
  oracle::PlanResult best = oracle::optimal_plan(environment, monitor);
  print_plan(best.plan, best.cost);
  return 0;
}

int run_gen_corpus(const std::string& out_dir, std::size_t environments,
                   std::size_t records_per_env, const std::string& domain,
                   const GlobalOptions& global) {
  datagen::CorpusConfig config;
  config.environments = environments;
  config.records_per_environment = records_per_env;
  config.seed = global.seed;
  if (domain == "manipulation") {
    config.domain = env::DomainKind::manipulation;
  } else if (domain != "navigation") {
    throw Error(ErrorCode::generic, "unknown domain: " + domain);
  }
  datagen::Corpus corpus = datagen::generate_corpus(config);
  datagen::save_corpus(corpus, out_dir);
  std::cout << "environments: " << corpus.environments.size() << "\n";
  std::cout << "records: " << corpus.records.size() << "\n";
  std::cout << "phrase collisions: " << phrase_collisions(corpus) << "\n";
  std::cout << "corpus written to " << out_dir << "\n";
  return 0;
}

int run_export_pairs(const std::string& corpus_dir,
                     const std::string& out_file) {
  datagen::Corpus corpus = datagen::load_corpus(corpus_dir);
  std::vector<oracle::OracleTask> tasks;
  tasks.reserve(corpus.records.size());
  for (const datagen::TaskRecord& record : corpus.records) {
    oracle::OracleTask task;
    task.environment_file = record.environment_file;
    task.environment = &corpus.environments[record.environment_id];
    task.nl = record.nl;
    task.spec = datagen::grounded_spec(record);
    tasks.push_back(std::move(task));
  }
  std::ofstream out(out_file);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write file: " + out_file);
  }
  oracle::ExportReport report = oracle::export_training_pairs(tasks, out);
  std::cout << "written: " << report.written << "\n";
  std::cout << "skipped: " << report.skipped.size() << "\n";
  for (const oracle::ExportSkip& skip : report.skipped) {
    std::cout << "  record " << skip.index << ": " << skip.reason << "\n";
  }
  return 0;
}

int run_evaluate(const std::string& corpus_dir, const std::string& planner,
                 const std::string& policy_name, bool serial, bool no_timing,
                 const std::string& report_file,
                 const GlobalOptions& global) {
  datagen::Corpus corpus = datagen::load_corpus(corpus_dir);
  evaluation::EvaluationConfig config;
  auto kind = evaluation::planner_kind_from_name(planner);
  if (!kind) {
    throw Error(ErrorCode::generic, "unknown planner: " + planner);
  }
  config.planner = *kind;
  config.time_limit_seconds = global.time_limit;
  config.seed = global.seed;
  config.serial = serial;

  evaluation::PolicyFactory factory = [&policy_name] {
    return make_policy(policy_name);
  };
  evaluation::EvaluationReport report =
      evaluation::evaluate(corpus, config, factory);

  if (no_timing) {
    // Wall time is the only non-deterministic part of the report; drop it
    // when byte-stable output is needed.
    report.overall.pt = 0.0;
    for (auto& [n, row] : report.by_constraint_count) row.pt = 0.0;
    for (auto& outcome : report.outcomes) outcome.planning_seconds = 0.0;
  }

  std::cout << evaluation::render_report(report);
  if (!report_file.empty()) {
    std::ofstream out(report_file);
    if (!out) {
      throw Error(ErrorCode::io_error, "cannot write file: " + report_file);
    }
    out << evaluation::report_to_json(report) << "\n";
  }
  return 0;
}

int run_stats(const std::string& corpus_dir) {
  datagen::Corpus corpus = datagen::load_corpus(corpus_dir);
  datagen::ComplexityReport report = datagen::complexity_stats(corpus);
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "records: " << report.rows.size() << "\n";
  std::cout << "mean syntax depth: " << report.mean_depth << "\n";
  std::cout << "mean syntax width: " << report.mean_width << "\n";
  std::cout << "mean live automaton states: " << report.mean_states << "\n";
  std::cout << "mean live automaton edges: " << report.mean_edges << "\n";
  std::cout << "depth histogram:\n";
  for (const auto& [depth, count] : report.depth_histogram) {
    std::cout << "  " << depth << ": " << count << "\n";
  }
  std::cout << "phrase collisions: " << phrase_collisions(corpus) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plan-safety toolkit: temporal specs, safe decoding, optimal "
               "plans, datasets, and evaluation"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed")->capture_default_str();
  app.add_option("--format", global.format, "formula output format")
      ->check(CLI::IsMember({"infix", "prefix"}))
      ->capture_default_str();
  app.add_option("--alphabet", global.alphabet, "alphabet mode")
      ->check(CLI::IsMember({"full", "one-hot"}))
      ->capture_default_str();
  app.add_option("--state-cap", global.state_cap,
                 "automaton state budget")
      ->capture_default_str();
  app.add_option("--time-limit", global.time_limit,
                 "per-task time budget in seconds")
      ->capture_default_str();

  // parse
  std::vector<std::string> parse_formulas;
  bool parse_canonical = false;
  CLI::App* cmd_parse =
      app.add_subcommand("parse", "parse formulas and print them back");
  cmd_parse->fallthrough();
  cmd_parse->add_option("formula", parse_formulas, "formulas to parse")
      ->required();
  cmd_parse->add_flag("--canonical", parse_canonical,
                      "canonicalize before printing");

  // compile
  std::string compile_formula;
  std::string compile_universe;
  bool compile_dot = false;
  CLI::App* cmd_compile = app.add_subcommand(
      "compile", "compile a formula to its finite-trace automaton");
  cmd_compile->fallthrough();
  cmd_compile->add_option("formula", compile_formula, "the formula")
      ->required();
  cmd_compile->add_option("--universe", compile_universe,
                          "comma-separated atom universe (default: the "
                          "formula's atoms)");
  cmd_compile->add_flag("--dot", compile_dot, "emit a DOT graph");

  // check-equiv
  std::string equiv_lhs, equiv_rhs, equiv_universe;
  CLI::App* cmd_equiv = app.add_subcommand(
      "check-equiv", "decide finite-trace equivalence of two formulas");
  cmd_equiv->fallthrough();
  cmd_equiv->add_option("lhs", equiv_lhs, "first formula")->required();
  cmd_equiv->add_option("rhs", equiv_rhs, "second formula")->required();
  cmd_equiv->add_option("--universe", equiv_universe,
                        "comma-separated atom universe (default: union of "
                        "both formulas' atoms)");

  // vote
  std::vector<std::string> vote_candidates;
  std::string vote_file;
  CLI::App* cmd_vote = app.add_subcommand(
      "vote", "majority-vote equivalence classes of candidate formulas");
  cmd_vote->fallthrough();
  cmd_vote->add_option("candidate", vote_candidates, "candidate formulas");
  cmd_vote->add_option("--file", vote_file,
                       "file with one candidate per line (unparseable "
                       "lines are dropped)");

  // plan
  std::string plan_spec, plan_spec_file, plan_env, plan_policy = "uniform";
  std::size_t plan_max_steps = 0;
  bool plan_unconstrained = false;
  CLI::App* cmd_plan = app.add_subcommand(
      "plan", "sample a plan from a policy under safety masking");
  cmd_plan->fallthrough();
  cmd_plan->add_option("--spec", plan_spec, "specification formula");
  cmd_plan->add_option("--spec-file", plan_spec_file,
                       "file containing the specification");
  cmd_plan->add_option("--env", plan_env, "environment JSON file")
      ->required();
  cmd_plan->add_option("--policy", plan_policy,
                       "uniform | greedy | scripted:<file> | "
                       "subprocess:<command>")
      ->capture_default_str();
  cmd_plan->add_option("--max-steps", plan_max_steps,
                       "step budget (default: 4 x entities)");
  cmd_plan->add_flag("--unconstrained", plan_unconstrained,
                     "disable safety masking (baseline)");

  // oracle-plan
  std::string oracle_spec, oracle_spec_file, oracle_env;
  CLI::App* cmd_oracle = app.add_subcommand(
      "oracle-plan", "uniform-cost optimal plan over the product graph");
  cmd_oracle->fallthrough();
  cmd_oracle->add_option("--spec", oracle_spec, "specification formula");
  cmd_oracle->add_option("--spec-file", oracle_spec_file,
                         "file containing the specification");
  cmd_oracle->add_option("--env", oracle_env, "environment JSON file")
      ->required();

  // gen-corpus
  std::string corpus_out, corpus_domain = "navigation";
  std::size_t corpus_envs = 100, corpus_rpe = 5;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen-corpus", "generate a task corpus from the template grammar");
  cmd_gen->fallthrough();
  cmd_gen->add_option("--out", corpus_out, "output directory")->required();
  cmd_gen->add_option("--environments", corpus_envs,
                      "number of environments")
      ->capture_default_str();
  cmd_gen->add_option("--records-per-env", corpus_rpe,
                      "records per environment")
      ->capture_default_str();
  cmd_gen->add_option("--domain", corpus_domain,
                      "navigation | manipulation")
      ->check(CLI::IsMember({"navigation", "manipulation"}))
      ->capture_default_str();

  // export-pairs
  std::string export_corpus, export_out;
  CLI::App* cmd_export = app.add_subcommand(
      "export-pairs", "export (task, optimal plan) training pairs");
  cmd_export->fallthrough();
  cmd_export->add_option("--corpus", export_corpus, "corpus directory")
      ->required();
  cmd_export->add_option("--out", export_out, "output JSONL file")
      ->required();

  // evaluate
  std::string eval_corpus, eval_planner = "oracle",
              eval_policy = "uniform", eval_report_file;
  bool eval_serial = false, eval_no_timing = false;
  CLI::App* cmd_eval = app.add_subcommand(
      "evaluate", "run a planner over a corpus and report SF/CP/ET/PT");
  cmd_eval->fallthrough();
  cmd_eval->add_option("--corpus", eval_corpus, "corpus directory")
      ->required();
  cmd_eval->add_option("--planner", eval_planner,
                       "oracle | constrained | unconstrained")
      ->check(CLI::IsMember({"oracle", "constrained", "unconstrained"}))
      ->capture_default_str();
  cmd_eval->add_option("--policy", eval_policy,
                       "policy for the sampling planners")
      ->capture_default_str();
  cmd_eval->add_flag("--serial", eval_serial,
                     "use the serial reference loop");
  cmd_eval->add_flag("--no-timing", eval_no_timing,
                     "zero out wall-time fields for byte-stable output");
  cmd_eval->add_option("--report", eval_report_file,
                       "also write a machine-readable JSON report here");

  // stats
  std::string stats_corpus;
  CLI::App* cmd_stats = app.add_subcommand(
      "stats", "complexity statistics of a corpus");
  cmd_stats->fallthrough();
  cmd_stats->add_option("--corpus", stats_corpus, "corpus directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << kDocsPointer << "\n";
    return 1;
  }

  try {
    if (*cmd_parse) {
      return run_parse(parse_formulas, parse_canonical, global);
    }
    if (*cmd_compile) {
      return run_compile(compile_formula, compile_universe, compile_dot,
                         global);
    }
    if (*cmd_equiv) {
      return run_check_equiv(equiv_lhs, equiv_rhs, equiv_universe, global);
    }
    if (*cmd_vote) {
      return run_vote(vote_candidates, vote_file, global);
    }
    if (*cmd_plan) {
      return run_plan(plan_spec, plan_spec_file, plan_env, plan_policy,
                      plan_max_steps, plan_unconstrained, global);
    }
    if (*cmd_oracle) {
      return run_oracle_plan(oracle_spec, oracle_spec_file, oracle_env,
                             global);
    }
    if (*cmd_gen) {
      return run_gen_corpus(corpus_out, corpus_envs, corpus_rpe,
                            corpus_domain, global);
    }
    if (*cmd_export) {
      return run_export_pairs(export_corpus, export_out);
    }
    if (*cmd_eval) {
      return run_evaluate(eval_corpus, eval_planner, eval_policy, eval_serial,
                          eval_no_timing, eval_report_file, global);
    }
    if (*cmd_stats) {
      return run_stats(stats_corpus);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::generic);
  }
  return 0;
}
