#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "plansafe/formula.hpp"

namespace plansafe::automaton {
class AutomatonCache;
}  // namespace plansafe::automaton

namespace plansafe::voting {

// Outcome of equivalence voting over candidate formulas: the candidates are
// partitioned into logical-equivalence groups and the largest group wins.
struct VoteResult {
  std::vector<ltl::Formula> candidates;          // parseable inputs, in order
  std::vector<std::size_t> group_of;             // candidate -> group id
  std::vector<std::vector<std::size_t>> groups;  // group id -> candidates
  std::size_t winning_group = 0;
  ltl::Formula representative;  // winning group's representative member
  bool tie = false;     // group sizes alone did not determine the winner
  std::size_t dropped = 0;  // unparseable inputs dropped before grouping

  std::vector<std::size_t> group_sizes() const;
};

// Partitions candidates into logical-equivalence groups over the given atom
// universe. Each candidate is compared against one representative per
// existing group (at most |candidates| x |groups| equivalence checks, with
// memoized automata). A candidate whose automaton exceeds the state cap is
// quarantined into its own singleton group.
std::vector<std::vector<std::size_t>> group_by_equivalence(
    const std::vector<ltl::Formula>& candidates,
    const std::vector<std::string>& universe);

// As above, but reusing the caller's cache (which fixes the universe,
// alphabet mode, and state cap, and exposes query counters).
std::vector<std::vector<std::size_t>> group_by_equivalence(
    const std::vector<ltl::Formula>& candidates,
    automaton::AutomatonCache& cache);

// Groups the candidates (over the union of their atoms) and selects the
// winner: maximal group size, ties broken by smaller compiled automaton,
// then by lexicographically least canonical prefix rendering. The tie flag
// records that the size rule alone was not decisive. The representative is
// the group member with the least canonical rendering. Throws when
// `candidates` is empty.
VoteResult vote(const std::vector<ltl::Formula>& candidates);

// Parses one candidate per line (infix or prefix), drops unparseable lines
// (recorded in VoteResult::dropped), and votes over the rest. Throws when
// nothing parses.
VoteResult vote_lines(const std::vector<std::string>& lines);

// One random edit: swap a binary operator's operands, flip F <-> G at one
// node, or rename one atom occurrence to another universe atom (universe
// defaults to the formula's own atoms). The mutant is checked inequivalent
// to f and resampled up to 20 times; throws if no inequivalent mutant
// exists (e.g. constants).
ltl::Formula mutate_formula(const ltl::Formula& f, std::mt19937_64& rng,
                            std::vector<std::string> universe = {});

// As above, reusing the caller's cache for the inequivalence checks. The
// cache universe must cover the formula's atoms and the rename universe.
ltl::Formula mutate_formula(const ltl::Formula& f, std::mt19937_64& rng,
                            const std::vector<std::string>& universe,
                            automaton::AutomatonCache& cache);

// An NL -> formula source: returns a candidate or nullopt on parse failure.
// Stands in for a sampled language-model translation stage.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::optional<ltl::Formula> translate(std::string_view text,
                                                std::size_t sample_index) = 0;
};

// Test translator with a known ground truth: each sample returns the truth
// with probability p and otherwise a random single-edit mutation of it.
// Deterministic for a fixed seed.
class NoisyOracleTranslator : public Translator {
 public:
  NoisyOracleTranslator(ltl::Formula truth, double p,
                        std::vector<std::string> universe,
                        std::uint64_t seed);
  ~NoisyOracleTranslator() override;

  std::optional<ltl::Formula> translate(std::string_view text,
                                        std::size_t sample_index) override;

 private:
  ltl::Formula truth_;
  double p_;
  std::vector<std::string> universe_;
  std::mt19937_64 rng_;
  std::unique_ptr<automaton::AutomatonCache> cache_;
};

// Collects `samples` candidates from the translator (default: the 20x10
// request schedule) and votes. Parse failures are dropped and counted.
VoteResult vote_with_translator(Translator& translator,
                                std::string_view text,
                                std::size_t samples = 200);

}  // namespace plansafe::voting
