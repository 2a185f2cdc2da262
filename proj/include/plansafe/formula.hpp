// Temporal-logic formula AST, interpreted over finite traces.
//
// A Formula is an immutable tree shared via shared_ptr; copies are cheap and
// thread-safe to read concurrently.  Structural hashes are precomputed at
// construction, so hashing is O(1) and equality short-circuits on hash.
// A total canonical order (operator tag first, then children) makes sorted,
// deduplicated operand lists deterministic.

#ifndef PLANSAFE_FORMULA_HPP
#define PLANSAFE_FORMULA_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace plansafe::ltl {

enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
};

const char* op_name(Op op) noexcept;
bool op_is_unary(Op op) noexcept;
bool op_is_binary(Op op) noexcept;

// Atom names are identifiers: [A-Za-z_][A-Za-z0-9_]*, excluding the reserved
// words of the concrete syntax (true false X G F U).
bool is_valid_atom_name(const std::string& name) noexcept;

class Formula {
 public:
  // Default-constructed formula is the constant True.
  Formula();

  static Formula make_true();
  static Formula make_false();
  static Formula make_atom(std::string name);  // throws Error on bad name
  static Formula make_not(Formula f);
  static Formula make_and(Formula lhs, Formula rhs);
  static Formula make_or(Formula lhs, Formula rhs);
  static Formula make_implies(Formula lhs, Formula rhs);
  static Formula make_next(Formula f);
  static Formula make_globally(Formula f);
  static Formula make_finally(Formula f);
  static Formula make_until(Formula lhs, Formula rhs);

  Op op() const noexcept;
  bool is(Op o) const noexcept { return op() == o; }
  bool is_constant() const noexcept;

  // Atom nodes only.
  const std::string& atom_name() const;

  // child() for unary operators; left()/right() for binary ones.
  const Formula& child() const;
  const Formula& left() const;
  const Formula& right() const;

  std::size_t hash() const noexcept;

  // Structural equality / total canonical order.
  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept;
  static int compare(const Formula& a, const Formula& b) noexcept;
  friend bool operator<(const Formula& a, const Formula& b) noexcept {
    return compare(a, b) < 0;
  }

  // Sorted, deduplicated set of atom names.
  std::vector<std::string> atoms() const;

  // Syntax-tree metrics: depth counts nodes along the longest root-to-leaf
  // path (single atom = 1); width is the maximum node count at any depth;
  // size is the total node count.
  int depth() const noexcept;
  int width() const;
  int node_count() const noexcept;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

}  // namespace plansafe::ltl

#endif  // PLANSAFE_FORMULA_HPP
