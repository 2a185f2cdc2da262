#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plansafe/environment.hpp"
#include "plansafe/formula.hpp"
#include "plansafe/grounding.hpp"

namespace plansafe::datagen {

// Task-specification grammar: one goal class (visit_all) plus four
// constraint classes layered on top of it.
enum class TemplateClass {
  visit_all,            // F a1 & F a2 & ...
  ordering,             // !b U a        ("a before b")
  immediate_successor,  // G(a -> X b)
  avoidance_until,      // (!a U b) | G !a   ("no a until b, if ever")
  global_avoid          // G !a
};

const char* template_class_name(TemplateClass c) noexcept;
std::optional<TemplateClass> template_class_from_name(std::string_view name);

// Deterministic template builders (entity slots supplied by the caller).
ltl::Formula visit_all_template(const std::vector<std::string>& names);
ltl::Formula ordering_template(const std::string& first,
                               const std::string& later);
ltl::Formula immediate_successor_template(const std::string& trigger,
                                          const std::string& follow);
ltl::Formula avoidance_until_template(const std::string& avoided,
                                      const std::string& release);
ltl::Formula global_avoid_template(const std::string& avoided);

// Samples the template's entity slots without replacement from the
// placeholder universe and instantiates it. Throws when the universe is
// smaller than the template's arity.
ltl::Formula generate_formula(TemplateClass c, std::mt19937_64& rng,
                              const std::vector<std::string>& universe);

// Deterministic syntax-directed English with a fixed phrase table for the
// template shapes and an operator-by-operator fallback; injective on
// template instances.
std::string structured_english(const ltl::Formula& f);

// One corpus entry: a lifted specification over placeholders plus the map
// grounding them to entities of one environment.
struct TaskRecord {
  std::size_t environment_id = 0;
  std::string environment_file;
  std::string nl;  // structured English of the grounded spec
  ltl::Formula lifted_spec;
  std::vector<std::string> placeholders;  // naming order: A, B, C, ...
  ltl::GroundingMap grounding;
  std::size_t n_constraints = 0;  // constraint formulas beyond the goal
  std::uint64_t seed = 0;
};

// ground(lifted_spec) through the record's map.
ltl::Formula grounded_spec(const TaskRecord& record);

// Draws a visit_all goal plus n_constraints constraint formulas, grounds
// the placeholders to distinct environment entities, and accepts the draw
// only if the combined spec compiles with a live initial state and
// (whenever the instance is small enough to plan) an optimal plan exists.
// Rejection-resamples up to 50 times, then throws with the last draw.
// environment_id/environment_file are left for the corpus layer to fill.
TaskRecord make_task(const env::Environment& environment,
                     std::size_t n_constraints, std::uint64_t seed);

struct CorpusConfig {
  std::size_t environments = 100;
  std::size_t records_per_environment = 5;  // constraint counts 1..5
  env::DomainKind domain = env::DomainKind::navigation;
  std::uint64_t seed = 0;
};

struct Corpus {
  std::vector<env::Environment> environments;  // index = environment_id
  std::vector<TaskRecord> records;
};

// Deterministic function of the config: environment i from
// mix_seed(seed, i), then one record per constraint count. Environments
// generate in parallel.
Corpus generate_corpus(const CorpusConfig& config);

// Directory layout: envs/env_<id>.json plus corpus.jsonl (one record per
// line, keys {environment_id, environment_file, nl, ltl_prefix,
// placeholders, grounding, n_constraints, seed}).
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

std::string record_to_json_line(const TaskRecord& record);
TaskRecord record_from_json_line(const std::string& line);

struct ComplexityRow {
  std::size_t depth = 0;   // nodes on the longest root-to-leaf path
  std::size_t width = 0;   // most nodes on any one level
  std::size_t states = 0;  // live automaton states (grounded, one-hot)
  std::size_t edges = 0;   // transitions between live states
};

struct ComplexityReport {
  std::vector<ComplexityRow> rows;  // parallel to corpus.records
  double mean_depth = 0.0;
  double mean_width = 0.0;
  double mean_states = 0.0;
  double mean_edges = 0.0;
  std::map<std::size_t, std::size_t> depth_histogram;
};

std::size_t syntax_depth(const ltl::Formula& f);
std::size_t syntax_width(const ltl::Formula& f);

ComplexityReport complexity_stats(const Corpus& corpus);

}  // namespace plansafe::datagen
