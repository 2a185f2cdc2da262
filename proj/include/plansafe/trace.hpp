#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plansafe/formula.hpp"

namespace plansafe::ltl {

// A finite trace over a fixed, ordered universe of atomic propositions.
//
// Each step carries a labeling: the set of atoms that hold at that step,
// stored as a bitmask over the universe (hence at most 64 atoms). Traces are
// append-only during construction and treated as immutable afterwards; they
// are safe to share read-only across threads.
class Trace {
 public:
  static constexpr std::size_t kMaxUniverseSize = 64;

  Trace() = default;
  explicit Trace(std::vector<std::string> universe);

  const std::vector<std::string>& universe() const { return universe_; }
  std::size_t universe_size() const { return universe_.size(); }

  // Number of steps (labelings) in the trace.
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }

  // Raw bitmask of the labeling at `step`; bit i corresponds to universe()[i].
  std::uint64_t label_bits(std::size_t step) const;

  // Atom names of the labeling at `step`, in universe order.
  std::vector<std::string> label(std::size_t step) const;

  // Appends one labeling. The names overload rejects atoms outside the
  // universe; the bits overload rejects masks with bits beyond it.
  void push_back(const std::vector<std::string>& atoms);
  void push_back_bits(std::uint64_t bits);

  // Index of `name` in the universe, if declared.
  std::optional<std::size_t> atom_index(std::string_view name) const;

  // True iff `atom` holds at `step`. Throws if the atom is not in the
  // universe (a malformed trace/formula pairing) or `step` is out of range.
  bool holds(std::size_t step, std::string_view atom) const;

  // Renders e.g. "[{A}, {}, {B,C}]" with atoms in universe order.
  std::string to_string() const;

 private:
  std::vector<std::string> universe_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::uint64_t> steps_;
};

// Finite-trace satisfaction with STRONG Next; the semantic oracle for the
// whole toolkit. At position i over trace t of length n:
//   - true/false as expected;
//   - an atom holds iff i < n and it is in t[i];
//   - X f holds iff i+1 < n and f holds at i+1;
//   - G f holds iff f holds at every j in [i, n) (vacuously true at i = n);
//   - F f holds iff f holds at some j in [i, n);
//   - f U g holds iff g holds at some j in [i, n) with f at every k in [i, j).
// An exhausted suffix (i = n) therefore satisfies G f and falsifies atoms,
// X, F, and U. Throws if f mentions an atom outside t's universe or if
// position > t.size().
bool evaluate(const Formula& f, const Trace& t, std::size_t position = 0);

}  // namespace plansafe::ltl
