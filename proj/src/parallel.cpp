#include "plansafe/parallel.hpp"

#include <exception>

namespace plansafe {

void for_each_index(std::size_t n,
                    const std::function<void(std::size_t)>& fn) {
#if defined(_OPENMP)
  std::exception_ptr first_error;
  // OpenMP regions may not leak exceptions; capture the first and rethrow
  // once every thread has drained its remaining indices.
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(plansafe_for_each_index)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  for_each_index_serial(n, fn);
#endif
}

void for_each_index_serial(std::size_t n,
                           const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace plansafe
