#pragma once

#include <unordered_map>
#include <vector>

#include "plansafe/formula.hpp"

namespace plansafe::ltl {

// Rewrites a formula into a canonical, Boolean-simplified form that preserves
// finite-trace semantics at every position. Used to intern automaton states,
// so equal canonical forms must mean "same residual obligation".
//
// Shape of the result: the boolean layer is a flat disjunctive normal form —
// a right-nested | of right-nested &s of literals, with operands sorted
// (operator tag first, then children) and deduplicated. A literal is any
// canonical formula not rooted at & or |: an atom, a temporal operator
// (whose child is itself canonical), or an opaque negation. Keeping
// residuals in this two-level shape is what makes formula progression
// terminate: literals always come from the finite closure of the original
// formula, so only finitely many distinct residuals exist.
//
// Rules applied (bottom-up, to a fixed point by construction):
//   - constant folding (!true -> false, x & false -> false, X false -> false,
//     G true -> true, F false -> false, x U false -> false, ...);
//   - !!x -> x;
//   - "->" desugared to ! |;
//   - & distributed over | into DNF, with contradictory terms (containing
//     x and !x, i.e. complement pairs) dropped and subsumption pruning
//     (a term containing another whole term is redundant), which covers
//     idempotence and absorption (x & (x | y) -> x, x | (x & y) -> x);
//     complementary unit terms fold (x | !x -> true);
//   - negation pushed inward: De Morgan over & and |, !F x -> G !x,
//     !G x -> F !x (negation stays on atoms, X, and U);
//   - F F x -> F x, G G x -> G x;
//   - false U x -> x & F true, true U x -> F x, x U true -> F true.
//
// Note that "F true" (= at least one step remains) is NOT the constant true
// on finite traces and is deliberately left intact.
//
// Distinct canonical forms may still be semantically equivalent; that only
// costs automaton states, never correctness.
Formula canonicalize(const Formula& f);

// Canonicalizer with a structural memo table; use one instance per automaton
// compilation so shared residual subtrees are rewritten once. Not thread-safe;
// confine an instance to one owner.
class Canonicalizer {
 public:
  Formula operator()(const Formula& f);

  // One conjunction of a DNF, as a sorted, deduplicated literal list.
  using Term = std::vector<Formula>;

 private:
  Formula rewrite(const Formula& f);
  Formula negate_canonical(const Formula& c);
  std::vector<Term> dnf(const Formula& f);
  static Formula build_dnf(std::vector<Term> terms);

  std::unordered_map<Formula, Formula, FormulaHash> memo_;
};

}  // namespace plansafe::ltl
