#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plansafe/formula.hpp"
#include "plansafe/trace.hpp"

namespace plansafe::automaton {

// How transition labels range over the atom universe:
//   full    — every subset of the universe (2^|universe| labels, |u| <= 16);
//   one_hot — exactly the singleton labels (|universe| labels), matching
//             planning domains that emit one event proposition per action.
enum class AlphabetMode { full, one_hot };

const char* alphabet_mode_name(AlphabetMode m) noexcept;
std::optional<AlphabetMode> alphabet_mode_from_name(std::string_view name);

// Deterministic finite-trace automaton obtained by formula progression.
// States are interned canonical residual formulas; the transition table is
// dense over the enumerated labels of the alphabet mode. A state is accepting
// iff its residual is satisfied by the empty suffix; a state is dead iff no
// accepting state is reachable from it. Immutable once compiled; safe to
// share read-only across threads.
class TraceAutomaton {
 public:
  using StateId = std::uint32_t;
  static constexpr std::size_t kDefaultStateCap = 200000;

  const std::vector<std::string>& universe() const { return universe_; }
  AlphabetMode mode() const { return mode_; }

  std::size_t num_states() const { return residuals_.size(); }
  std::size_t num_labels() const { return num_labels_; }
  std::size_t num_edges() const { return residuals_.size() * num_labels_; }

  StateId initial_state() const { return initial_; }
  const ltl::Formula& residual(StateId s) const;
  bool is_accepting(StateId s) const;
  bool is_dead(StateId s) const;

  // Sorted ids of states from which no accepting state is reachable.
  std::vector<StateId> dead_states() const;

  // Transition lookup by enumerated label index.
  StateId next_state(StateId s, std::size_t label_index) const;

  // Label index <-> atom bitmask (bit i = universe()[i]). In one-hot mode
  // only singleton masks are valid labels.
  std::size_t label_index_of_bits(std::uint64_t bits) const;
  std::uint64_t label_bits_of_index(std::size_t label_index) const;

  // One transition on a bitmask label.
  StateId step(StateId s, std::uint64_t label_bits) const;

  // Runs the whole trace from the initial state; the trace universe must
  // equal the automaton universe.
  StateId run(const ltl::Trace& t) const;
  bool accepts(const ltl::Trace& t) const;

  // Structured text dump / DOT graph (formats documented in
  // docs/FORMATS.md).
  std::string dump() const;
  std::string to_dot() const;

 private:
  friend TraceAutomaton compile(const ltl::Formula&,
                                const std::vector<std::string>&, AlphabetMode,
                                std::size_t);
  TraceAutomaton() = default;

  std::string render_label(std::size_t label_index) const;

  std::vector<std::string> universe_;
  AlphabetMode mode_ = AlphabetMode::full;
  std::size_t num_labels_ = 0;
  StateId initial_ = 0;
  std::vector<ltl::Formula> residuals_;
  std::vector<std::uint8_t> accepting_;
  std::vector<std::uint8_t> dead_;
  std::vector<StateId> delta_;  // row-major: state * num_labels_ + label
};

// One progression step: the obligation that remains on the rest of the trace
// after seeing `label`. The result is canonicalized. Satisfies, for every
// continuation w: f accepts label·w iff progress(f, label) accepts w.
ltl::Formula progress(const ltl::Formula& f,
                      const std::vector<std::string>& label,
                      const std::vector<std::string>& universe);

// True iff f is satisfied by the empty (exhausted) trace suffix; decides
// state acceptance. Agrees with evaluate(f, [], 0) by construction.
bool end_accepting(const ltl::Formula& f);

// Right-nested conjunction of the given formulas in input order; the task
// spec conjoin([phi0, c1..cN]) keeps phi0 recoverable as left().
ltl::Formula conjoin(const std::vector<ltl::Formula>& fs);

// Compiles f over the given universe and alphabet mode by breadth-first
// progression from canonicalize(f). Throws when the interned state count
// would exceed state_cap (ErrorCode::state_cap_exceeded) or when f mentions
// an atom outside the universe.
TraceAutomaton compile(const ltl::Formula& f,
                       const std::vector<std::string>& universe,
                       AlphabetMode mode,
                       std::size_t state_cap = TraceAutomaton::kDefaultStateCap);

struct EquivalenceResult {
  bool equivalent = false;
  // For inequivalent pairs: the lexicographically least among the shortest
  // traces accepted by exactly one side (label order = enumeration order).
  std::optional<ltl::Trace> witness;
};

// Synchronized product walk over two compiled automata (same universe and
// mode), searching for a reachable state pair with differing acceptance.
EquivalenceResult check_equivalence(const TraceAutomaton& a,
                                    const TraceAutomaton& b);

EquivalenceResult check_equivalence(
    const ltl::Formula& f, const ltl::Formula& g,
    const std::vector<std::string>& universe, AlphabetMode mode,
    std::size_t state_cap = TraceAutomaton::kDefaultStateCap);

bool are_equivalent(const ltl::Formula& f, const ltl::Formula& g,
                    const std::vector<std::string>& universe,
                    AlphabetMode mode,
                    std::size_t state_cap = TraceAutomaton::kDefaultStateCap);

// Memoizing front end over compile/check_equivalence for a fixed universe,
// alphabet mode, and state cap: automata are cached per canonical formula and
// equivalence verdicts per canonical pair. Not thread-safe; confine an
// instance to one owner.
class AutomatonCache {
 public:
  AutomatonCache(std::vector<std::string> universe, AlphabetMode mode,
                 std::size_t state_cap = TraceAutomaton::kDefaultStateCap);

  std::shared_ptr<const TraceAutomaton> automaton(const ltl::Formula& f);
  bool are_equivalent(const ltl::Formula& f, const ltl::Formula& g);

  std::size_t compilations() const { return automata_.size(); }
  std::size_t equivalence_queries() const { return equivalence_queries_; }
  std::size_t equivalence_cache_hits() const {
    return equivalence_cache_hits_;
  }

 private:
  struct PairHash {
    std::size_t operator()(
        const std::pair<ltl::Formula, ltl::Formula>& p) const noexcept {
      return p.first.hash() * 1000003u ^ p.second.hash();
    }
  };

  std::vector<std::string> universe_;
  AlphabetMode mode_;
  std::size_t state_cap_;
  std::unordered_map<ltl::Formula, std::shared_ptr<const TraceAutomaton>,
                     ltl::FormulaHash>
      automata_;
  std::unordered_map<std::pair<ltl::Formula, ltl::Formula>, bool, PairHash>
      verdicts_;
  std::size_t equivalence_queries_ = 0;
  std::size_t equivalence_cache_hits_ = 0;
};

}  // namespace plansafe::automaton
