#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sattack {

/// How data-parallel loops are dispatched. `serial` is the reference path
/// the parallel kernels are tested against; both produce identical results
/// because every iteration writes only its own output slot and reductions
/// happen afterwards in index order.
enum class Execution { serial, parallel };

/// Calls fn(i) for i in [0, n). The first exception (lowest index) is
/// rethrown after the loop completes.
template <class Fn>
void for_each_index(Execution exec, std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(exec == Execution::parallel ? n : 0);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

}  // namespace sattack
