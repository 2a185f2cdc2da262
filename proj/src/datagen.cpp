#include "plansafe/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "plansafe/automaton.hpp"
#include "plansafe/error.hpp"
#include "plansafe/oracle.hpp"
#include "plansafe/parallel.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/rng.hpp"

namespace plansafe::datagen {

namespace {

using ltl::Formula;
using ltl::Op;

constexpr std::size_t kResampleBudget = 50;

// Entity slots a template consumes (visit_all consumes its whole universe).
std::size_t template_arity(TemplateClass c) {
  switch (c) {
    case TemplateClass::visit_all:
      return 1;
    case TemplateClass::global_avoid:
      return 1;
    default:
      return 2;
  }
}

std::string atom_phrase(const std::string& name) {
  // Manipulation propositions are spelled "<block>_in_<box>".
  std::size_t split = name.find("_in_");
  if (split != std::string::npos && split > 0 &&
      split + 4 < name.size()) {
    return "put " + name.substr(0, split) + " in " + name.substr(split + 4);
  }
  return "visit " + name;
}

std::string perfect_phrase(const std::string& name) {
  std::size_t split = name.find("_in_");
  if (split != std::string::npos && split > 0 &&
      split + 4 < name.size()) {
    return "you have put " + name.substr(0, split) + " in " +
           name.substr(split + 4);
  }
  return "you have visited " + name;
}

bool is_atom(const Formula& f) { return f.is(Op::Atom); }

std::string phrase(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return "do anything";
    case Op::False:
      return "do the impossible";
    case Op::Atom:
      return atom_phrase(f.atom_name());
    case Op::Not:
      if (is_atom(f.child())) {
        return "do not " + atom_phrase(f.child().atom_name());
      }
      return "it is not the case that " + phrase(f.child());
    case Op::Next:
      return "in the next step, " + phrase(f.child());
    case Op::Finally:
      if (is_atom(f.child())) {
        return "eventually " + atom_phrase(f.child().atom_name());
      }
      return "eventually, " + phrase(f.child());
    case Op::Globally: {
      const Formula& body = f.child();
      if (body.is(Op::Not) && is_atom(body.child())) {
        return "never " + atom_phrase(body.child().atom_name());
      }
      if (body.is(Op::Implies) && is_atom(body.left()) &&
          body.right().is(Op::Next) && is_atom(body.right().child())) {
        return "whenever you " + atom_phrase(body.left().atom_name()) +
               ", " + atom_phrase(body.right().child().atom_name()) +
               " immediately next";
      }
      return "at every step, " + phrase(body);
    }
    case Op::And:
      return phrase(f.left()) + " and " + phrase(f.right());
    case Op::Or: {
      // Weak-avoidance shape: (!a U b) | G !a.
      const Formula& l = f.left();
      const Formula& r = f.right();
      if (l.is(Op::Until) && l.left().is(Op::Not) &&
          is_atom(l.left().child()) && is_atom(l.right()) &&
          r.is(Op::Globally) && r.child().is(Op::Not) &&
          is_atom(r.child().child()) &&
          l.left().child() == r.child().child()) {
        return "do not " + atom_phrase(l.left().child().atom_name()) +
               " until " + perfect_phrase(l.right().atom_name()) +
               ", if ever";
      }
      return "either " + phrase(l) + " or " + phrase(r);
    }
    case Op::Implies:
      return "if " + phrase(f.left()) + ", then " + phrase(f.right());
    case Op::Until:
      if (f.left().is(Op::Not) && is_atom(f.left().child()) &&
          is_atom(f.right())) {
        return "do not " + atom_phrase(f.left().child().atom_name()) +
               " until " + perfect_phrase(f.right().atom_name());
      }
      return phrase(f.left()) + " until " + phrase(f.right());
  }
  throw Error(ErrorCode::generic, "unreachable formula shape");
}

// Collects distinct entity slots from the universe, in draw order.
std::vector<std::string> draw_slots(std::mt19937_64& rng,
                                    const std::vector<std::string>& universe,
                                    std::size_t count) {
  std::vector<std::string> pool = universe;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t at = static_cast<std::size_t>(pick(rng, pool.size()));
    out.push_back(pool[at]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
  }
  return out;
}

// Entities the placeholders may ground to. Navigation draws distinct
// rooms. Manipulation draws distinct BLOCKS (each paired with a random
// box): the arm moves a block at most once, so two goal propositions over
// one block can never both be achieved.
std::vector<std::string> draw_grounding(const env::Environment& environment,
                                        std::mt19937_64& rng,
                                        std::size_t count) {
  if (environment.kind() == env::DomainKind::navigation) {
    return draw_slots(rng, environment.propositions(), count);
  }
  std::vector<std::string> block_names;
  for (const env::Entity& block : environment.blocks()) {
    block_names.push_back(block.name);
  }
  std::vector<std::string> blocks = draw_slots(rng, block_names, count);
  std::vector<std::string> out;
  for (const std::string& block : blocks) {
    const env::Entity& box =
        environment.boxes()[pick(rng, environment.boxes().size())];
    out.push_back(block + "_in_" + box.name);
  }
  return out;
}

std::size_t grounding_capacity(const env::Environment& environment) {
  if (environment.kind() == env::DomainKind::navigation) {
    return environment.propositions().size();
  }
  return environment.blocks().size();
}

std::string placeholder_name(std::size_t index) {
  std::string name(1, static_cast<char>('A' + index % 26));
  if (index >= 26) name += std::to_string(index / 26);
  return name;
}

std::string env_file_name(std::size_t id) {
  std::ostringstream s;
  s << "envs/env_" << std::setw(3) << std::setfill('0') << id << ".json";
  return s.str();
}

void depth_levels(const Formula& f, std::size_t level,
                  std::vector<std::size_t>& per_level) {
  if (per_level.size() < level) per_level.resize(level, 0);
  ++per_level[level - 1];
  switch (f.op()) {
    case Op::Not:
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      depth_levels(f.child(), level + 1, per_level);
      break;
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until:
      depth_levels(f.left(), level + 1, per_level);
      depth_levels(f.right(), level + 1, per_level);
      break;
    default:
      break;
  }
}

}  // namespace

const char* template_class_name(TemplateClass c) noexcept {
  switch (c) {
    case TemplateClass::visit_all:
      return "visit-all";
    case TemplateClass::ordering:
      return "ordering";
    case TemplateClass::immediate_successor:
      return "immediate-successor";
    case TemplateClass::avoidance_until:
      return "avoidance-until";
    case TemplateClass::global_avoid:
      return "global-avoid";
  }
  return "unknown";
}

std::optional<TemplateClass> template_class_from_name(std::string_view name) {
  for (TemplateClass c :
       {TemplateClass::visit_all, TemplateClass::ordering,
        TemplateClass::immediate_successor, TemplateClass::avoidance_until,
        TemplateClass::global_avoid}) {
    if (name == template_class_name(c)) return c;
  }
  return std::nullopt;
}

Formula visit_all_template(const std::vector<std::string>& names) {
  if (names.empty()) {
    throw Error(ErrorCode::generic, "visit-all needs at least one entity");
  }
  std::vector<Formula> goals;
  goals.reserve(names.size());
  for (const std::string& name : names) {
    goals.push_back(Formula::make_finally(Formula::make_atom(name)));
  }
  return automaton::conjoin(goals);
}

Formula ordering_template(const std::string& first,
                          const std::string& later) {
  return Formula::make_until(
      Formula::make_not(Formula::make_atom(later)),
      Formula::make_atom(first));
}

Formula immediate_successor_template(const std::string& trigger,
                                     const std::string& follow) {
  return Formula::make_globally(Formula::make_implies(
      Formula::make_atom(trigger),
      Formula::make_next(Formula::make_atom(follow))));
}

Formula avoidance_until_template(const std::string& avoided,
                                 const std::string& release) {
  return Formula::make_or(
      Formula::make_until(Formula::make_not(Formula::make_atom(avoided)),
                          Formula::make_atom(release)),
      Formula::make_globally(
          Formula::make_not(Formula::make_atom(avoided))));
}

Formula global_avoid_template(const std::string& avoided) {
  return Formula::make_globally(
      Formula::make_not(Formula::make_atom(avoided)));
}

Formula generate_formula(TemplateClass c, std::mt19937_64& rng,
                         const std::vector<std::string>& universe) {
  if (universe.size() < template_arity(c)) {
    throw Error(ErrorCode::generic,
                std::string("placeholder universe too small for ") +
                    template_class_name(c));
  }
  switch (c) {
    case TemplateClass::visit_all:
      return visit_all_template(universe);
    case TemplateClass::ordering: {
      std::vector<std::string> s = draw_slots(rng, universe, 2);
      return ordering_template(s[0], s[1]);
    }
    case TemplateClass::immediate_successor: {
      std::vector<std::string> s = draw_slots(rng, universe, 2);
      return immediate_successor_template(s[0], s[1]);
    }
    case TemplateClass::avoidance_until: {
      std::vector<std::string> s = draw_slots(rng, universe, 2);
      return avoidance_until_template(s[0], s[1]);
    }
    case TemplateClass::global_avoid: {
      std::vector<std::string> s = draw_slots(rng, universe, 1);
      return global_avoid_template(s[0]);
    }
  }
  throw Error(ErrorCode::generic, "unknown template class");
}

std::string structured_english(const Formula& f) { return phrase(f); }

Formula grounded_spec(const TaskRecord& record) {
  return ltl::ground(record.lifted_spec, record.grounding);
}

TaskRecord make_task(const env::Environment& environment,
                     std::size_t n_constraints, std::uint64_t seed) {
  if (n_constraints < 1 || n_constraints > 5) {
    throw Error(ErrorCode::generic,
                "constraint count must lie in [1, 5], got " +
                    std::to_string(n_constraints));
  }
  const std::size_t capacity = grounding_capacity(environment);
  if (capacity < 2) {
    throw Error(ErrorCode::generic,
                "environment has too few entities for task generation");
  }

  const bool can_plan =
      environment.kind() == env::DomainKind::navigation ||
      environment.blocks().size() <= 8;

  std::string last_failure = "no draw attempted";
  for (std::size_t attempt = 0; attempt < kResampleBudget; ++attempt) {
    std::mt19937_64 rng(mix_seed(seed, attempt));

    const std::size_t targets = 2 + pick(rng, 2);
    const std::size_t pool_size =
        std::min(targets + std::min<std::size_t>(n_constraints, 2),
                 capacity);

    std::vector<std::string> placeholders;
    for (std::size_t i = 0; i < pool_size; ++i) {
      placeholders.push_back(placeholder_name(i));
    }

    std::vector<std::string> goal_targets(
        placeholders.begin(),
        placeholders.begin() +
            static_cast<std::ptrdiff_t>(std::min(targets, pool_size)));
    std::vector<Formula> parts = {visit_all_template(goal_targets)};

    const TemplateClass constraint_classes[] = {
        TemplateClass::ordering, TemplateClass::immediate_successor,
        TemplateClass::avoidance_until, TemplateClass::global_avoid};
    for (std::size_t i = 0; i < n_constraints; ++i) {
      TemplateClass c = constraint_classes[pick(rng, 4)];
      parts.push_back(generate_formula(c, rng, placeholders));
    }
    Formula lifted = automaton::conjoin(parts);

    ltl::GroundingMap grounding;
    std::vector<std::string> slots =
        draw_grounding(environment, rng, pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) {
      grounding.insert(placeholders[i], slots[i]);
    }
    Formula grounded = ltl::ground(lifted, grounding);

    try {
      automaton::TraceAutomaton monitor =
          automaton::compile(grounded, environment.propositions(),
                             automaton::AlphabetMode::one_hot);
      if (monitor.is_dead(monitor.initial_state())) {
        last_failure = ltl::render_infix(grounded);
        continue;
      }
      // Navigation realizes every accepted label sequence directly; with a
      // move-once arm the automaton alone is not enough, so plan for real
      // whenever the instance is small enough.
      if (can_plan &&
          environment.kind() == env::DomainKind::manipulation) {
        oracle::optimal_plan(environment, monitor);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::state_cap_exceeded &&
          e.code() != ErrorCode::unsatisfiable_spec) {
        throw;
      }
      last_failure = ltl::render_infix(grounded);
      continue;
    }

    TaskRecord record;
    record.nl = phrase(ltl::ground(parts[0], grounding));
    for (std::size_t i = 1; i < parts.size(); ++i) {
      record.nl += "; " + phrase(ltl::ground(parts[i], grounding));
    }
    record.lifted_spec = std::move(lifted);
    record.placeholders = std::move(placeholders);
    record.grounding = std::move(grounding);
    record.n_constraints = n_constraints;
    record.seed = seed;
    return record;
  }
  throw Error(ErrorCode::unsatisfiable_spec,
              "no satisfiable specification after " +
                  std::to_string(kResampleBudget) +
                  " draws; last rejected: " + last_failure);
}

Corpus generate_corpus(const CorpusConfig& config) {
  if (config.environments == 0 || config.records_per_environment == 0) {
    throw Error(ErrorCode::generic,
                "corpus needs at least one environment and one record");
  }
  Corpus corpus;
  corpus.environments.reserve(config.environments);
  for (std::size_t i = 0; i < config.environments; ++i) {
    corpus.environments.push_back(env::random_environment(
        config.domain, mix_seed(config.seed, 1000000 + i)));
  }

  const std::size_t per_env = config.records_per_environment;
  std::vector<std::vector<TaskRecord>> slots(config.environments);
  for_each_index(config.environments, [&](std::size_t i) {
    std::vector<TaskRecord> mine;
    mine.reserve(per_env);
    for (std::size_t j = 0; j < per_env; ++j) {
      TaskRecord record = make_task(corpus.environments[i], 1 + (j % 5),
                                    mix_seed(config.seed, i * per_env + j));
      record.environment_id = i;
      record.environment_file = env_file_name(i);
      mine.push_back(std::move(record));
    }
    slots[i] = std::move(mine);
  });
  for (std::vector<TaskRecord>& group : slots) {
    for (TaskRecord& record : group) {
      corpus.records.push_back(std::move(record));
    }
  }
  return corpus;
}

std::string record_to_json_line(const TaskRecord& record) {
  nlohmann::ordered_json j;
  j["environment_id"] = record.environment_id;
  j["environment_file"] = record.environment_file;
  j["nl"] = record.nl;
  j["ltl_prefix"] = ltl::render_prefix(record.lifted_spec);
  j["placeholders"] = record.placeholders;
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for (const auto& [placeholder, grounded] : record.grounding.entries()) {
    map[placeholder] = grounded;
  }
  j["grounding"] = std::move(map);
  j["n_constraints"] = record.n_constraints;
  j["seed"] = record.seed;
  return j.dump();
}

TaskRecord record_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("bad corpus record: ") + e.what());
  }
  try {
    TaskRecord record;
    record.environment_id = j.at("environment_id").get<std::size_t>();
    record.environment_file = j.at("environment_file").get<std::string>();
    record.nl = j.at("nl").get<std::string>();
    record.lifted_spec =
        ltl::parse_formula(j.at("ltl_prefix").get<std::string>());
    record.placeholders =
        j.at("placeholders").get<std::vector<std::string>>();
    std::map<std::string, std::string> entries;
    for (const auto& [key, value] : j.at("grounding").items()) {
      entries[key] = value.get<std::string>();
    }
    record.grounding = ltl::GroundingMap(entries);
    record.n_constraints = j.at("n_constraints").get<std::size_t>();
    record.seed = j.at("seed").get<std::uint64_t>();
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("bad corpus record: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "envs", ec);
  if (ec) {
    throw Error(ErrorCode::io_error,
                "cannot create corpus directory: " + dir.string());
  }
  for (std::size_t i = 0; i < corpus.environments.size(); ++i) {
    env::save_environment(corpus.environments[i],
                          (dir / env_file_name(i)).string());
  }
  std::ofstream out(dir / "corpus.jsonl");
  if (!out) {
    throw Error(ErrorCode::io_error,
                "cannot write corpus file in " + dir.string());
  }
  for (const TaskRecord& record : corpus.records) {
    out << record_to_json_line(record) << "\n";
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  std::ifstream in(dir / "corpus.jsonl");
  if (!in) {
    throw Error(ErrorCode::io_error,
                "cannot read corpus file in " + dir.string());
  }
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    corpus.records.push_back(record_from_json_line(line));
  }
  std::size_t max_id = 0;
  for (const TaskRecord& record : corpus.records) {
    max_id = std::max(max_id, record.environment_id);
  }
  for (std::size_t i = 0; i <= max_id; ++i) {
    corpus.environments.push_back(
        env::load_environment((dir / env_file_name(i)).string()));
  }
  for (const TaskRecord& record : corpus.records) {
    if (record.environment_file != env_file_name(record.environment_id)) {
      throw Error(ErrorCode::parse_error,
                  "corpus record points at an unexpected environment file: " +
                      record.environment_file);
    }
  }
  return corpus;
}

std::size_t syntax_depth(const Formula& f) {
  std::vector<std::size_t> per_level;
  depth_levels(f, 1, per_level);
  return per_level.size();
}

std::size_t syntax_width(const Formula& f) {
  std::vector<std::size_t> per_level;
  depth_levels(f, 1, per_level);
  return *std::max_element(per_level.begin(), per_level.end());
}

ComplexityReport complexity_stats(const Corpus& corpus) {
  if (corpus.records.empty()) {
    throw Error(ErrorCode::generic, "complexity stats need a corpus");
  }
  ComplexityReport report;
  report.rows.resize(corpus.records.size());
  for_each_index(corpus.records.size(), [&](std::size_t i) {
    const TaskRecord& record = corpus.records[i];
    ComplexityRow row;
    row.depth = syntax_depth(record.lifted_spec);
    row.width = syntax_width(record.lifted_spec);
    const env::Environment& environment =
        corpus.environments.at(record.environment_id);
    automaton::TraceAutomaton monitor =
        automaton::compile(grounded_spec(record),
                           environment.propositions(),
                           automaton::AlphabetMode::one_hot);
    for (automaton::TraceAutomaton::StateId s = 0;
         s < monitor.num_states(); ++s) {
      if (monitor.is_dead(s)) continue;
      ++row.states;
      for (std::size_t l = 0; l < monitor.num_labels(); ++l) {
        if (!monitor.is_dead(monitor.next_state(s, l))) ++row.edges;
      }
    }
    report.rows[i] = row;
  });

  for (const ComplexityRow& row : report.rows) {
    report.mean_depth += static_cast<double>(row.depth);
    report.mean_width += static_cast<double>(row.width);
    report.mean_states += static_cast<double>(row.states);
    report.mean_edges += static_cast<double>(row.edges);
    ++report.depth_histogram[row.depth];
  }
  const double n = static_cast<double>(report.rows.size());
  report.mean_depth /= n;
  report.mean_width /= n;
  report.mean_states /= n;
  report.mean_edges /= n;
  return report;
}

}  // namespace plansafe::datagen
