#pragma once

#include <cstddef>
#include <functional>

namespace plansafe {

// Applies fn(i) for every i in [0, n), distributing the indices across
// OpenMP threads when OpenMP is enabled. Call sites must make indices
// independent: write results into index-addressed slots and derive any RNG
// stream from the index (mix_seed), never from shared mutable state. The
// first exception thrown by any index is rethrown after the loop drains.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn);

// Serial reference implementation with identical semantics, kept for
// differential tests and the scheduling benchmark.
void for_each_index_serial(std::size_t n,
                           const std::function<void(std::size_t)>& fn);

}  // namespace plansafe
