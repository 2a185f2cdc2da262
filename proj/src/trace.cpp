#include "plansafe/trace.hpp"

#include <utility>

#include "plansafe/error.hpp"

namespace plansafe::ltl {

Trace::Trace(std::vector<std::string> universe)
    : universe_(std::move(universe)) {
  if (universe_.size() > kMaxUniverseSize) {
    throw Error(ErrorCode::generic,
                "trace universe has " + std::to_string(universe_.size()) +
                    " atoms; at most " + std::to_string(kMaxUniverseSize) +
                    " are supported");
  }
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (!is_valid_atom_name(universe_[i])) {
      throw Error(ErrorCode::generic,
                  "invalid atom name in trace universe: '" + universe_[i] +
                      "'");
    }
    if (!index_.emplace(universe_[i], i).second) {
      throw Error(ErrorCode::generic,
                  "duplicate atom in trace universe: '" + universe_[i] + "'");
    }
  }
}

std::uint64_t Trace::label_bits(std::size_t step) const {
  if (step >= steps_.size()) {
    throw Error(ErrorCode::generic, "trace step index out of range");
  }
  return steps_[step];
}

std::vector<std::string> Trace::label(std::size_t step) const {
  std::uint64_t bits = label_bits(step);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (bits & (std::uint64_t{1} << i)) names.push_back(universe_[i]);
  }
  return names;
}

void Trace::push_back(const std::vector<std::string>& atoms) {
  std::uint64_t bits = 0;
  for (const std::string& a : atoms) {
    auto it = index_.find(a);
    if (it == index_.end()) {
      throw Error(ErrorCode::generic,
                  "atom '" + a + "' is not in the trace universe");
    }
    bits |= std::uint64_t{1} << it->second;
  }
  steps_.push_back(bits);
}

void Trace::push_back_bits(std::uint64_t bits) {
  if (universe_.size() < kMaxUniverseSize &&
      (bits >> universe_.size()) != 0) {
    throw Error(ErrorCode::generic,
                "labeling has bits outside the trace universe");
  }
  steps_.push_back(bits);
}

std::optional<std::size_t> Trace::atom_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Trace::holds(std::size_t step, std::string_view atom) const {
  auto idx = atom_index(atom);
  if (!idx) {
    throw Error(ErrorCode::generic, "atom '" + std::string(atom) +
                                        "' is not in the trace universe");
  }
  return (label_bits(step) >> *idx) & 1;
}

std::string Trace::to_string() const {
  std::string out = "[";
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    if (s > 0) out += ", ";
    out += "{";
    bool first = true;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (steps_[s] & (std::uint64_t{1} << i)) {
        if (!first) out += ",";
        out += universe_[i];
        first = false;
      }
    }
    out += "}";
  }
  out += "]";
  return out;
}

namespace {

bool eval_rec(const Formula& f, const Trace& t, std::size_t pos) {
  const std::size_t n = t.size();
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return pos < n && t.holds(pos, f.atom_name());
    case Op::Not:
      return !eval_rec(f.child(), t, pos);
    case Op::And:
      return eval_rec(f.left(), t, pos) && eval_rec(f.right(), t, pos);
    case Op::Or:
      return eval_rec(f.left(), t, pos) || eval_rec(f.right(), t, pos);
    case Op::Implies:
      return !eval_rec(f.left(), t, pos) || eval_rec(f.right(), t, pos);
    case Op::Next:
      return pos + 1 < n && eval_rec(f.child(), t, pos + 1);
    case Op::Globally:
      for (std::size_t j = pos; j < n; ++j) {
        if (!eval_rec(f.child(), t, j)) return false;
      }
      return true;
    case Op::Finally:
      for (std::size_t j = pos; j < n; ++j) {
        if (eval_rec(f.child(), t, j)) return true;
      }
      return false;
    case Op::Until:
      for (std::size_t j = pos; j < n; ++j) {
        if (eval_rec(f.right(), t, j)) return true;
        if (!eval_rec(f.left(), t, j)) return false;
      }
      return false;
  }
  throw Error(ErrorCode::generic, "unreachable formula operator");
}

}  // namespace

bool evaluate(const Formula& f, const Trace& t, std::size_t position) {
  if (position > t.size()) {
    throw Error(ErrorCode::generic,
                "evaluation position exceeds trace length");
  }
  // Validate the atom set eagerly so universe mismatches surface regardless
  // of boolean short-circuiting during the recursive walk.
  for (const std::string& a : f.atoms()) {
    if (!t.atom_index(a)) {
      throw Error(ErrorCode::generic,
                  "formula atom '" + a + "' is not in the trace universe");
    }
  }
  return eval_rec(f, t, position);
}

}  // namespace plansafe::ltl
