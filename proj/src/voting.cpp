#include "plansafe/voting.hpp"

#include <algorithm>
#include <limits>
#include <tuple>
#include <utility>

#include "plansafe/automaton.hpp"
#include "plansafe/error.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/rng.hpp"
#include "plansafe/simplify.hpp"

namespace plansafe::voting {

namespace {

using ltl::Formula;
using ltl::Op;

std::vector<std::string> atom_union(const std::vector<Formula>& fs) {
  std::vector<std::string> universe;
  for (const Formula& f : fs) {
    std::vector<std::string> atoms = f.atoms();
    universe.insert(universe.end(), atoms.begin(), atoms.end());
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()),
                 universe.end());
  return universe;
}

bool is_state_cap(const Error& e) {
  return e.code() == ErrorCode::state_cap_exceeded;
}

// Sort key for representative selection and the final tie rule: least
// canonical prefix rendering, with node count and raw rendering as
// deterministic secondary keys among canonically identical members.
struct RenderKey {
  std::string canonical;
  int nodes = 0;
  std::string raw;

  bool operator<(const RenderKey& o) const {
    return std::tie(canonical, nodes, raw) <
           std::tie(o.canonical, o.nodes, o.raw);
  }
};

RenderKey render_key(const Formula& f) {
  return {ltl::render_prefix(ltl::canonicalize(f)), f.node_count(),
          ltl::render_prefix(f)};
}

VoteResult vote_impl(std::vector<Formula> candidates, std::size_t dropped) {
  if (candidates.empty()) {
    throw Error(ErrorCode::generic, "vote requires at least one candidate");
  }

  VoteResult result;
  result.dropped = dropped;
  result.groups = group_by_equivalence(candidates, atom_union(candidates));
  result.group_of.assign(candidates.size(), 0);
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    for (std::size_t member : result.groups[g]) {
      result.group_of[member] = g;
    }
  }

  // Representative per group: the member with the least canonical rendering.
  std::vector<std::size_t> representative(result.groups.size());
  std::vector<RenderKey> group_key(result.groups.size());
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    representative[g] = result.groups[g].front();
    group_key[g] = render_key(candidates[representative[g]]);
    for (std::size_t k = 1; k < result.groups[g].size(); ++k) {
      RenderKey key = render_key(candidates[result.groups[g][k]]);
      if (key < group_key[g]) {
        representative[g] = result.groups[g][k];
        group_key[g] = std::move(key);
      }
    }
  }

  std::size_t max_size = 0;
  for (const std::vector<std::size_t>& group : result.groups) {
    max_size = std::max(max_size, group.size());
  }
  std::vector<std::size_t> leaders;
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    if (result.groups[g].size() == max_size) leaders.push_back(g);
  }
  result.tie = leaders.size() > 1;

  // Tie rule 1: smaller compiled automaton for the group representative.
  // A representative that exceeds the state cap cannot win a tie.
  if (leaders.size() > 1) {
    automaton::AutomatonCache cache(atom_union(candidates),
                                    automaton::AlphabetMode::full);
    std::vector<std::size_t> states(leaders.size());
    for (std::size_t i = 0; i < leaders.size(); ++i) {
      try {
        states[i] = cache.automaton(candidates[representative[leaders[i]]])
                        ->num_states();
      } catch (const Error& e) {
        if (!is_state_cap(e)) throw;
        states[i] = std::numeric_limits<std::size_t>::max();
      }
    }
    std::size_t min_states = *std::min_element(states.begin(), states.end());
    std::vector<std::size_t> narrowed;
    for (std::size_t i = 0; i < leaders.size(); ++i) {
      if (states[i] == min_states) narrowed.push_back(leaders[i]);
    }
    leaders = std::move(narrowed);
  }

  // Tie rule 2: lexicographically least canonical prefix rendering.
  std::size_t winner = leaders.front();
  for (std::size_t g : leaders) {
    if (group_key[g] < group_key[winner]) winner = g;
  }

  result.winning_group = winner;
  result.representative = candidates[representative[winner]];
  result.candidates = std::move(candidates);
  return result;
}

enum class EditKind { swap_operands, flip_temporal, rename_atom };

struct Edit {
  EditKind kind;
  std::size_t node;  // preorder index
  std::size_t arg;   // rename target: index into the universe
};

void collect_edits(const Formula& f, const std::vector<std::string>& universe,
                   std::size_t& counter, std::vector<Edit>& edits) {
  const std::size_t node = counter++;
  switch (f.op()) {
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until:
      edits.push_back({EditKind::swap_operands, node, 0});
      collect_edits(f.left(), universe, counter, edits);
      collect_edits(f.right(), universe, counter, edits);
      break;
    case Op::Finally:
    case Op::Globally:
      edits.push_back({EditKind::flip_temporal, node, 0});
      collect_edits(f.child(), universe, counter, edits);
      break;
    case Op::Not:
    case Op::Next:
      collect_edits(f.child(), universe, counter, edits);
      break;
    case Op::Atom:
      for (std::size_t i = 0; i < universe.size(); ++i) {
        if (universe[i] != f.atom_name()) {
          edits.push_back({EditKind::rename_atom, node, i});
        }
      }
      break;
    case Op::True:
    case Op::False:
      break;
  }
}

Formula apply_edit(const Formula& f, const Edit& edit,
                   const std::vector<std::string>& universe,
                   std::size_t& counter) {
  const std::size_t node = counter++;
  if (node == edit.node) {
    switch (edit.kind) {
      case EditKind::swap_operands:
        switch (f.op()) {
          case Op::And:
            return Formula::make_and(f.right(), f.left());
          case Op::Or:
            return Formula::make_or(f.right(), f.left());
          case Op::Implies:
            return Formula::make_implies(f.right(), f.left());
          default:
            return Formula::make_until(f.right(), f.left());
        }
      case EditKind::flip_temporal:
        return f.is(Op::Finally) ? Formula::make_globally(f.child())
                                 : Formula::make_finally(f.child());
      case EditKind::rename_atom:
        return Formula::make_atom(universe[edit.arg]);
    }
  }
  switch (f.op()) {
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until: {
      Formula left = apply_edit(f.left(), edit, universe, counter);
      Formula right = apply_edit(f.right(), edit, universe, counter);
      switch (f.op()) {
        case Op::And:
          return Formula::make_and(std::move(left), std::move(right));
        case Op::Or:
          return Formula::make_or(std::move(left), std::move(right));
        case Op::Implies:
          return Formula::make_implies(std::move(left), std::move(right));
        default:
          return Formula::make_until(std::move(left), std::move(right));
      }
    }
    case Op::Not:
      return Formula::make_not(apply_edit(f.child(), edit, universe, counter));
    case Op::Next:
      return Formula::make_next(
          apply_edit(f.child(), edit, universe, counter));
    case Op::Finally:
      return Formula::make_finally(
          apply_edit(f.child(), edit, universe, counter));
    case Op::Globally:
      return Formula::make_globally(
          apply_edit(f.child(), edit, universe, counter));
    default:
      return f;
  }
}

std::vector<std::string> with_atoms_of(std::vector<std::string> universe,
                                       const Formula& f) {
  std::vector<std::string> atoms = f.atoms();
  universe.insert(universe.end(), atoms.begin(), atoms.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()),
                 universe.end());
  return universe;
}

}  // namespace

std::vector<std::size_t> VoteResult::group_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const std::vector<std::size_t>& group : groups) {
    sizes.push_back(group.size());
  }
  return sizes;
}

std::vector<std::vector<std::size_t>> group_by_equivalence(
    const std::vector<Formula>& candidates,
    const std::vector<std::string>& universe) {
  automaton::AutomatonCache cache(universe, automaton::AlphabetMode::full);
  return group_by_equivalence(candidates, cache);
}

std::vector<std::vector<std::size_t>> group_by_equivalence(
    const std::vector<Formula>& candidates,
    automaton::AutomatonCache& cache) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> quarantined_group;

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool placed = false;
    try {
      // Compile once up front so an oversized candidate is quarantined
      // instead of failing repeatedly inside each group comparison.
      cache.automaton(candidates[i]);
      for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
        if (quarantined_group[g]) continue;
        if (cache.are_equivalent(candidates[i],
                                 candidates[groups[g].front()])) {
          groups[g].push_back(i);
          placed = true;
        }
      }
    } catch (const Error& e) {
      if (!is_state_cap(e)) throw;
      groups.push_back({i});
      quarantined_group.push_back(true);
      continue;
    }
    if (!placed) {
      groups.push_back({i});
      quarantined_group.push_back(false);
    }
  }
  return groups;
}

VoteResult vote(const std::vector<Formula>& candidates) {
  return vote_impl(candidates, 0);
}

VoteResult vote_lines(const std::vector<std::string>& lines) {
  std::vector<Formula> candidates;
  std::size_t dropped = 0;
  for (const std::string& line : lines) {
    try {
      candidates.push_back(ltl::parse_formula(line));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parse_error) throw;
      ++dropped;
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::parse_error, "no candidate line parsed");
  }
  return vote_impl(std::move(candidates), dropped);
}

Formula mutate_formula(const Formula& f, std::mt19937_64& rng,
                       std::vector<std::string> universe) {
  if (universe.empty()) universe = f.atoms();
  automaton::AutomatonCache cache(with_atoms_of(universe, f),
                                  automaton::AlphabetMode::full);
  return mutate_formula(f, rng, universe, cache);
}

Formula mutate_formula(const Formula& f, std::mt19937_64& rng,
                       const std::vector<std::string>& universe,
                       automaton::AutomatonCache& cache) {
  std::vector<Edit> edits;
  std::size_t counter = 0;
  collect_edits(f, universe, counter, edits);
  if (edits.empty()) {
    throw Error(ErrorCode::generic,
                "formula admits no mutation: " + ltl::render_infix(f));
  }

  for (int attempt = 0; attempt < 20; ++attempt) {
    const Edit& edit = edits[pick(rng, edits.size())];
    counter = 0;
    Formula mutant = apply_edit(f, edit, universe, counter);
    if (!cache.are_equivalent(f, mutant)) return mutant;
  }
  throw Error(ErrorCode::generic,
              "no inequivalent mutant found for: " + ltl::render_infix(f));
}

NoisyOracleTranslator::NoisyOracleTranslator(Formula truth, double p,
                                             std::vector<std::string> universe,
                                             std::uint64_t seed)
    : truth_(std::move(truth)),
      p_(p),
      universe_(std::move(universe)),
      rng_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(
        ErrorCode::generic,
        "oracle accuracy must lie in [0, 1], got " + std::to_string(p));
  }
  if (universe_.empty()) universe_ = truth_.atoms();
  cache_ = std::make_unique<automaton::AutomatonCache>(
      with_atoms_of(universe_, truth_), automaton::AlphabetMode::full);
}

NoisyOracleTranslator::~NoisyOracleTranslator() = default;

std::optional<Formula> NoisyOracleTranslator::translate(
    std::string_view /*text*/, std::size_t /*sample_index*/) {
  if (unit_real(rng_) < p_) return truth_;
  return mutate_formula(truth_, rng_, universe_, *cache_);
}

VoteResult vote_with_translator(Translator& translator, std::string_view text,
                                std::size_t samples) {
  std::vector<Formula> candidates;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (std::optional<Formula> f = translator.translate(text, i)) {
      candidates.push_back(std::move(*f));
    } else {
      ++dropped;
    }
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::generic, "translator produced no candidates");
  }
  return vote_impl(std::move(candidates), dropped);
}

}  // namespace plansafe::voting
