#include "plansafe/grounding.hpp"

#include <functional>

#include "plansafe/error.hpp"

namespace plansafe::ltl {

GroundingMap::GroundingMap(const std::map<std::string, std::string>& entries) {
  for (const auto& [placeholder, grounded] : entries) {
    insert(placeholder, grounded);
  }
}

void GroundingMap::insert(const std::string& placeholder,
                          const std::string& grounded) {
  if (!is_valid_atom_name(placeholder) || !is_valid_atom_name(grounded)) {
    throw Error(ErrorCode::generic,
                "grounding entry '" + placeholder + "' -> '" + grounded +
                    "' uses an invalid atom name");
  }
  if (forward_.count(placeholder)) {
    throw Error(ErrorCode::generic,
                "duplicate placeholder in grounding map: '" + placeholder +
                    "'");
  }
  if (backward_.count(grounded)) {
    throw Error(ErrorCode::generic,
                "grounding map is not injective: '" + grounded +
                    "' appears twice");
  }
  forward_.emplace(placeholder, grounded);
  backward_.emplace(grounded, placeholder);
}

std::optional<std::string> GroundingMap::grounded(
    std::string_view placeholder) const {
  auto it = forward_.find(std::string(placeholder));
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> GroundingMap::placeholder(
    std::string_view grounded) const {
  auto it = backward_.find(std::string(grounded));
  if (it == backward_.end()) return std::nullopt;
  return it->second;
}

namespace {

Formula rename_atoms(
    const Formula& f,
    const std::function<std::string(const std::string&)>& rename) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom:
      return Formula::make_atom(rename(f.atom_name()));
    case Op::Not:
      return Formula::make_not(rename_atoms(f.child(), rename));
    case Op::Next:
      return Formula::make_next(rename_atoms(f.child(), rename));
    case Op::Globally:
      return Formula::make_globally(rename_atoms(f.child(), rename));
    case Op::Finally:
      return Formula::make_finally(rename_atoms(f.child(), rename));
    case Op::And:
      return Formula::make_and(rename_atoms(f.left(), rename),
                               rename_atoms(f.right(), rename));
    case Op::Or:
      return Formula::make_or(rename_atoms(f.left(), rename),
                              rename_atoms(f.right(), rename));
    case Op::Implies:
      return Formula::make_implies(rename_atoms(f.left(), rename),
                                   rename_atoms(f.right(), rename));
    case Op::Until:
      return Formula::make_until(rename_atoms(f.left(), rename),
                                 rename_atoms(f.right(), rename));
  }
  throw Error(ErrorCode::generic, "unreachable formula operator");
}

}  // namespace

Formula ground(const Formula& f, const GroundingMap& m) {
  return rename_atoms(f, [&](const std::string& atom) {
    auto name = m.grounded(atom);
    if (!name) {
      throw Error(ErrorCode::generic,
                  "no grounding entry for placeholder '" + atom + "'");
    }
    return *name;
  });
}

Formula lift(const Formula& f, const GroundingMap& m) {
  return rename_atoms(f, [&](const std::string& atom) {
    auto name = m.placeholder(atom);
    if (!name) {
      throw Error(ErrorCode::generic,
                  "atom '" + atom + "' is not a grounded name of the map");
    }
    return *name;
  });
}

}  // namespace plansafe::ltl
