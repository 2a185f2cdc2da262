// Shared helpers for the test binaries: deterministic random formula/trace
// generation and exhaustive small-trace enumeration. Random choices are made
// directly from mt19937_64 output (not std distributions) so generated cases
// are identical across standard library implementations.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "plansafe/formula.hpp"
#include "plansafe/trace.hpp"

namespace plansafe::testsupport {

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Random formula of depth at most `depth_budget` (depth counts nodes on the
// longest root-to-leaf path, so a budget of 1 forces a leaf).
inline ltl::Formula random_formula(std::mt19937_64& rng, int depth_budget,
                                   const std::vector<std::string>& atoms) {
  using ltl::Formula;
  auto leaf = [&]() {
    std::uint64_t r = pick(rng, 10);
    if (r == 0) return Formula::make_true();
    if (r == 1) return Formula::make_false();
    return Formula::make_atom(atoms[pick(rng, atoms.size())]);
  };
  if (depth_budget <= 1) return leaf();
  switch (pick(rng, 12)) {
    case 0:
    case 1:
      return leaf();
    case 2:
      return Formula::make_not(random_formula(rng, depth_budget - 1, atoms));
    case 3:
      return Formula::make_next(random_formula(rng, depth_budget - 1, atoms));
    case 4:
      return Formula::make_globally(
          random_formula(rng, depth_budget - 1, atoms));
    case 5:
    case 6:
      return Formula::make_finally(
          random_formula(rng, depth_budget - 1, atoms));
    case 7:
    case 8:
      return Formula::make_and(random_formula(rng, depth_budget - 1, atoms),
                               random_formula(rng, depth_budget - 1, atoms));
    case 9:
      return Formula::make_or(random_formula(rng, depth_budget - 1, atoms),
                              random_formula(rng, depth_budget - 1, atoms));
    case 10:
      return Formula::make_implies(
          random_formula(rng, depth_budget - 1, atoms),
          random_formula(rng, depth_budget - 1, atoms));
    default:
      return Formula::make_until(random_formula(rng, depth_budget - 1, atoms),
                                 random_formula(rng, depth_budget - 1, atoms));
  }
}

// Random trace of length <= max_len; each step is a uniform subset of the
// universe (or a uniform singleton when one_hot is set).
inline ltl::Trace random_trace(std::mt19937_64& rng,
                               const std::vector<std::string>& universe,
                               std::size_t max_len, bool one_hot = false) {
  ltl::Trace t(universe);
  std::size_t len = pick(rng, max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    if (one_hot) {
      t.push_back_bits(std::uint64_t{1} << pick(rng, universe.size()));
    } else {
      t.push_back_bits(pick(rng, std::uint64_t{1} << universe.size()));
    }
  }
  return t;
}

// Calls `fn` once for every trace over `universe` of length 0..max_len.
// Full mode enumerates all 2^|universe| labelings per step; one-hot mode
// only the |universe| singleton labelings.
inline void enumerate_traces(const std::vector<std::string>& universe,
                             std::size_t max_len, bool one_hot,
                             const std::function<void(const ltl::Trace&)>& fn) {
  std::vector<std::uint64_t> labels;
  if (one_hot) {
    for (std::size_t i = 0; i < universe.size(); ++i) {
      labels.push_back(std::uint64_t{1} << i);
    }
  } else {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << universe.size()); ++m) {
      labels.push_back(m);
    }
  }
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<std::size_t> odo(len, 0);
    while (true) {
      ltl::Trace t(universe);
      for (std::size_t i = 0; i < len; ++i) t.push_back_bits(labels[odo[i]]);
      fn(t);
      std::size_t p = 0;
      while (p < len && ++odo[p] == labels.size()) {
        odo[p] = 0;
        ++p;
      }
      if (p == len) break;
    }
  }
}

// Number of traces enumerate_traces visits for the given parameters.
inline std::uint64_t trace_count(std::size_t universe_size,
                                 std::size_t max_len, bool one_hot) {
  std::uint64_t per_step =
      one_hot ? universe_size : (std::uint64_t{1} << universe_size);
  std::uint64_t total = 0, pow = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    total += pow;
    pow *= per_step;
  }
  return total;
}

}  // namespace plansafe::testsupport
