#include "plansafe/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "plansafe/error.hpp"

namespace plansafe::ltl {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) noexcept {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

constexpr std::array<const char*, 11> kOpNames = {
    "true", "false", "atom", "!", "&", "|", "->", "X", "G", "F", "U"};

}  // namespace

struct Formula::Node {
  Op op;
  std::string atom;  // Atom nodes only
  Formula lhs;       // null inside leaf nodes
  Formula rhs;
  std::size_t hash = 0;
  int depth = 0;
  int count = 0;

  Node(Op o, std::string a, Formula l, Formula r)
      : op(o), atom(std::move(a)), lhs(std::move(l)), rhs(std::move(r)) {
    std::size_t h = static_cast<std::size_t>(op) * 0x9e3779b97f4a7c15ULL + 1;
    if (!atom.empty()) h = hash_combine(h, std::hash<std::string>{}(atom));
    int d = 0, c = 0;
    if (lhs.node_) {
      h = hash_combine(h, lhs.node_->hash);
      d = std::max(d, lhs.node_->depth);
      c += lhs.node_->count;
    }
    if (rhs.node_) {
      h = hash_combine(h, rhs.node_->hash);
      d = std::max(d, rhs.node_->depth);
      c += rhs.node_->count;
    }
    hash = h;
    depth = d + 1;
    count = c + 1;
  }

  static Formula null() { return Formula(nullptr); }

  static Formula make(Op o, std::string a, Formula l, Formula r) {
    return Formula(
        std::make_shared<const Node>(o, std::move(a), std::move(l), std::move(r)));
  }
};

const char* op_name(Op op) noexcept {
  return kOpNames[static_cast<std::size_t>(op)];
}

bool op_is_unary(Op op) noexcept {
  return op == Op::Not || op == Op::Next || op == Op::Globally ||
         op == Op::Finally;
}

bool op_is_binary(Op op) noexcept {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}

bool is_valid_atom_name(const std::string& name) noexcept {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
    return false;
  for (char ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
      return false;
  static const std::set<std::string> reserved = {"true", "false", "X",
                                                 "G",    "F",     "U"};
  return reserved.find(name) == reserved.end();
}

Formula Formula::make_true() {
  static const Formula f =
      Node::make(Op::True, {}, Node::null(), Node::null());
  return f;
}

Formula Formula::make_false() {
  static const Formula f =
      Node::make(Op::False, {}, Node::null(), Node::null());
  return f;
}

Formula::Formula() : node_(make_true().node_) {}

Formula Formula::make_atom(std::string name) {
  if (!is_valid_atom_name(name))
    throw Error(ErrorCode::parse_error, "invalid atom name: '" + name + "'");
  return Node::make(Op::Atom, std::move(name), Node::null(), Node::null());
}

Formula Formula::make_not(Formula f) {
  return Node::make(Op::Not, {}, std::move(f), Node::null());
}

Formula Formula::make_and(Formula lhs, Formula rhs) {
  return Node::make(Op::And, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::make_or(Formula lhs, Formula rhs) {
  return Node::make(Op::Or, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::make_implies(Formula lhs, Formula rhs) {
  return Node::make(Op::Implies, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::make_next(Formula f) {
  return Node::make(Op::Next, {}, std::move(f), Node::null());
}

Formula Formula::make_globally(Formula f) {
  return Node::make(Op::Globally, {}, std::move(f), Node::null());
}

Formula Formula::make_finally(Formula f) {
  return Node::make(Op::Finally, {}, std::move(f), Node::null());
}

Formula Formula::make_until(Formula lhs, Formula rhs) {
  return Node::make(Op::Until, {}, std::move(lhs), std::move(rhs));
}

Op Formula::op() const noexcept { return node_->op; }

bool Formula::is_constant() const noexcept {
  return node_->op == Op::True || node_->op == Op::False;
}

const std::string& Formula::atom_name() const { return node_->atom; }

const Formula& Formula::child() const { return node_->lhs; }

const Formula& Formula::left() const { return node_->lhs; }

const Formula& Formula::right() const { return node_->rhs; }

std::size_t Formula::hash() const noexcept { return node_->hash; }

namespace {

bool structurally_equal(const Formula& a, const Formula& b) noexcept {
  if (a.hash() != b.hash()) return false;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Atom:
      return a.atom_name() == b.atom_name();
    case Op::Not:
    case Op::Next:
    case Op::Globally:
    case Op::Finally:
      return structurally_equal(a.child(), b.child());
    default:
      return structurally_equal(a.left(), b.left()) &&
             structurally_equal(a.right(), b.right());
  }
}

}  // namespace

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  return structurally_equal(a, b);
}

bool operator!=(const Formula& a, const Formula& b) noexcept {
  return !(a == b);
}

int Formula::compare(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return 0;
  if (a.node_->op != b.node_->op) return a.node_->op < b.node_->op ? -1 : 1;
  switch (a.node_->op) {
    case Op::True:
    case Op::False:
      return 0;
    case Op::Atom:
      return a.node_->atom.compare(b.node_->atom);
    case Op::Not:
    case Op::Next:
    case Op::Globally:
    case Op::Finally:
      return compare(a.child(), b.child());
    default: {
      int c = compare(a.left(), b.left());
      if (c != 0) return c;
      return compare(a.right(), b.right());
    }
  }
}

namespace {

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return;
    case Op::Atom:
      out.insert(f.atom_name());
      return;
    case Op::Not:
    case Op::Next:
    case Op::Globally:
    case Op::Finally:
      collect_atoms(f.child(), out);
      return;
    default:
      collect_atoms(f.left(), out);
      collect_atoms(f.right(), out);
      return;
  }
}

void count_per_level(const Formula& f, std::size_t level,
                     std::vector<int>& counts) {
  if (counts.size() <= level) counts.resize(level + 1, 0);
  counts[level]++;
  if (op_is_unary(f.op())) {
    count_per_level(f.child(), level + 1, counts);
  } else if (op_is_binary(f.op())) {
    count_per_level(f.left(), level + 1, counts);
    count_per_level(f.right(), level + 1, counts);
  }
}

}  // namespace

std::vector<std::string> Formula::atoms() const {
  std::set<std::string> s;
  collect_atoms(*this, s);
  return {s.begin(), s.end()};
}

int Formula::depth() const noexcept { return node_->depth; }

int Formula::width() const {
  std::vector<int> counts;
  count_per_level(*this, 0, counts);
  return *std::max_element(counts.begin(), counts.end());
}

int Formula::node_count() const noexcept { return node_->count; }

}  // namespace plansafe::ltl
