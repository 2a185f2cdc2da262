#include "plansafe/simplify.hpp"

#include <algorithm>
#include <vector>

#include "plansafe/error.hpp"

namespace plansafe::ltl {

namespace {

// Appends the operands of a maximal `op`-rooted subtree, left to right.
void flatten(Op op, const Formula& f, std::vector<Formula>& out) {
  if (f.is(op)) {
    flatten(op, f.left(), out);
    flatten(op, f.right(), out);
  } else {
    out.push_back(f);
  }
}

bool contains(const std::vector<Formula>& sorted, const Formula& f) {
  return std::binary_search(sorted.begin(), sorted.end(), f);
}

// F x with the F-specific folds applied (x is already canonical).
Formula make_finally_canonical(Formula x) {
  if (x.is(Op::False)) return x;
  if (x.is(Op::Finally)) return x;
  return Formula::make_finally(std::move(x));
}

Formula make_globally_canonical(Formula x) {
  if (x.is(Op::True)) return x;
  if (x.is(Op::Globally)) return x;
  return Formula::make_globally(std::move(x));
}

}  // namespace

Formula Canonicalizer::operator()(const Formula& f) {
  auto it = memo_.find(f);
  if (it != memo_.end()) return it->second;
  Formula out = rewrite(f);
  memo_.emplace(f, out);
  return out;
}

// Negation of an already-canonical operand, pushed inward so that & and |
// keep flattening across it: De Morgan over & and |, the finite-trace duals
// !F x = G !x and !G x = F !x, and double-negation elimination. Negation
// stays opaque on atoms, X, and U (the syntax has no weak-next/release to
// push it into).
Formula Canonicalizer::negate_canonical(const Formula& c) {
  switch (c.op()) {
    case Op::True:
      return Formula::make_false();
    case Op::False:
      return Formula::make_true();
    case Op::Not:
      return c.child();
    case Op::And:
      return (*this)(Formula::make_or(Formula::make_not(c.left()),
                                      Formula::make_not(c.right())));
    case Op::Or:
      return (*this)(Formula::make_and(Formula::make_not(c.left()),
                                       Formula::make_not(c.right())));
    case Op::Globally:
      return (*this)(
          Formula::make_finally(Formula::make_not(c.child())));
    case Op::Finally:
      return (*this)(
          Formula::make_globally(Formula::make_not(c.child())));
    default:
      return Formula::make_not(c);
  }
}

Formula Canonicalizer::rewrite(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;

    case Op::Not:
      return negate_canonical((*this)(f.child()));

    case Op::Implies:
      return (*this)(
          Formula::make_or(Formula::make_not(f.left()), f.right()));

    case Op::Next: {
      Formula c = (*this)(f.child());
      if (c.is(Op::False)) return c;
      return Formula::make_next(std::move(c));
    }

    case Op::Globally:
      return make_globally_canonical((*this)(f.child()));

    case Op::Finally:
      return make_finally_canonical((*this)(f.child()));

    case Op::Until: {
      Formula l = (*this)(f.left());
      Formula r = (*this)(f.right());
      if (r.is(Op::False)) return r;
      if (r.is(Op::True)) return Formula::make_finally(Formula::make_true());
      // false U x demands x at the current, non-final position: x & F true
      // (x alone would differ on the exhausted suffix); true U x is plain
      // eventuality.
      if (l.is(Op::False)) {
        return (*this)(Formula::make_and(
            std::move(r), Formula::make_finally(Formula::make_true())));
      }
      if (l.is(Op::True)) return make_finally_canonical(std::move(r));
      return Formula::make_until(std::move(l), std::move(r));
    }

    case Op::And:
    case Op::Or: {
      std::vector<Term> terms = dnf(f);
      return build_dnf(std::move(terms));
    }
  }
  throw Error(ErrorCode::generic, "unreachable formula operator");
}

// --- DNF machinery -------------------------------------------------------
//
// The boolean layer of a canonical formula is a disjunction of conjunctions
// of literals, where a literal is any canonical formula not rooted at & or |
// (atoms, constants folded away, temporal operators, opaque negations).
// Keeping residuals in this flat two-level shape is what makes progression
// terminate: literals always come from the finite closure of the original
// formula, so only finitely many distinct residuals exist.

namespace {

// Normalizes one conjunction in place: sort, dedup, drop `true`.
// Returns false if the term is contradictory (contains `false` or an x/!x
// pair) and should be dropped.
bool normalize_term(Canonicalizer::Term& t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::erase_if(t, [](const Formula& l) { return l.is(Op::True); });
  for (const Formula& l : t) {
    if (l.is(Op::False)) return false;
    if (l.is(Op::Not) && contains(t, l.child())) return false;
  }
  return true;
}

// True iff every literal of `small` occurs in `big` (both sorted).
bool term_subsumes(const Canonicalizer::Term& small,
                   const Canonicalizer::Term& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool term_less(const Canonicalizer::Term& a, const Canonicalizer::Term& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

constexpr std::size_t kMaxDnfTerms = 65536;

}  // namespace

// Disjunctive normal form of f's boolean layer, as sets of literal terms.
std::vector<Canonicalizer::Term> Canonicalizer::dnf(const Formula& f) {
  if (f.is(Op::And)) {
    // Cross-product of the operands' DNFs.
    std::vector<Term> acc = {{}};
    std::vector<Formula> ops;
    flatten(Op::And, f, ops);
    for (const Formula& o : ops) {
      std::vector<Term> rhs = dnf(o);
      std::vector<Term> next;
      next.reserve(acc.size() * rhs.size());
      if (acc.size() * rhs.size() > kMaxDnfTerms) {
        throw Error(ErrorCode::state_cap_exceeded,
                    "formula too large: boolean normal form exceeds " +
                        std::to_string(kMaxDnfTerms) + " terms");
      }
      for (const Term& a : acc) {
        for (const Term& b : rhs) {
          Term merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          if (normalize_term(merged)) next.push_back(std::move(merged));
        }
      }
      std::sort(next.begin(), next.end(), term_less);
      next.erase(std::unique(next.begin(), next.end()), next.end());
      acc = std::move(next);
    }
    return acc;
  }
  if (f.is(Op::Or)) {
    std::vector<Term> acc;
    std::vector<Formula> ops;
    flatten(Op::Or, f, ops);
    for (const Formula& o : ops) {
      std::vector<Term> rhs = dnf(o);
      acc.insert(acc.end(), rhs.begin(), rhs.end());
    }
    return acc;
  }
  // Leaf of the boolean layer: canonicalize as a literal. The result may
  // itself be boolean (e.g. an implication desugars), so re-dispatch.
  Formula c = (*this)(f);
  if (c.is(Op::And) || c.is(Op::Or)) return dnf(c);
  if (c.is(Op::False)) return {};
  Term t = {std::move(c)};
  if (!normalize_term(t)) return {};
  return {std::move(t)};
}

// Rebuilds a canonical formula from DNF terms: terms pruned by subsumption,
// each term a right-nested & over sorted literals, the whole a right-nested
// | over sorted term formulas.
Formula Canonicalizer::build_dnf(std::vector<Term> terms) {
  for (Term& t : terms) {
    if (t.empty()) return Formula::make_true();
  }
  if (terms.empty()) return Formula::make_false();
  std::sort(terms.begin(), terms.end(), term_less);
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  // Tautology from complementary unit terms: x | !x.
  for (const Term& t : terms) {
    if (t.size() == 1 && t[0].is(Op::Not)) {
      Term unit = {t[0].child()};
      if (std::binary_search(terms.begin(), terms.end(), unit, term_less)) {
        return Formula::make_true();
      }
    }
  }

  // Subsumption: a term containing another whole term is redundant (covers
  // absorption and idempotence). Terms are distinct after dedup, so
  // containment is strict and never mutual.
  std::vector<bool> redundant(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size() && !redundant[i]; ++j) {
      redundant[i] = (i != j) && term_subsumes(terms[j], terms[i]);
    }
  }
  std::vector<Term> kept;
  kept.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!redundant[i]) kept.push_back(std::move(terms[i]));
  }

  std::vector<Formula> parts;
  parts.reserve(kept.size());
  for (const Term& t : kept) {
    Formula acc = t.back();
    for (std::size_t i = t.size() - 1; i-- > 0;) {
      acc = Formula::make_and(t[i], std::move(acc));
    }
    parts.push_back(std::move(acc));
  }
  std::sort(parts.begin(), parts.end());
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    acc = Formula::make_or(parts[i], std::move(acc));
  }
  return acc;
}

Formula canonicalize(const Formula& f) {
  Canonicalizer c;
  return c(f);
}

}  // namespace plansafe::ltl
