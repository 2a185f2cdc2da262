#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "plansafe/formula.hpp"

namespace plansafe::ltl {

// Bijective mapping from placeholder atom names (as used by lifted formulas,
// e.g. "A", "B") to concrete landmark/object names (e.g. "walmart"). Both
// directions must be unique so that grounding and lifting are inverses.
class GroundingMap {
 public:
  GroundingMap() = default;
  explicit GroundingMap(const std::map<std::string, std::string>& entries);

  // Adds one placeholder -> grounded pair. Throws if either side is already
  // present (the map must stay injective) or either name is invalid.
  void insert(const std::string& placeholder, const std::string& grounded);

  std::optional<std::string> grounded(std::string_view placeholder) const;
  std::optional<std::string> placeholder(std::string_view grounded) const;

  const std::map<std::string, std::string>& entries() const {
    return forward_;
  }
  std::size_t size() const { return forward_.size(); }
  bool empty() const { return forward_.empty(); }

 private:
  std::map<std::string, std::string> forward_;
  std::map<std::string, std::string> backward_;
};

// Renames every atom of `f` through the map (placeholder -> grounded).
// Throws if some atom of `f` has no entry.
Formula ground(const Formula& f, const GroundingMap& m);

// Inverse renaming (grounded -> placeholder); lift(ground(f, m), m) == f.
// Throws if some atom of `f` is not a grounded name of the map.
Formula lift(const Formula& f, const GroundingMap& m);

}  // namespace plansafe::ltl
