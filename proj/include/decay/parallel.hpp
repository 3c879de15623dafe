#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace decay {

/// Runs fn(i) for i in [0, n) on the OpenMP pool. Each index must write only
/// its own output slot, which keeps results independent of the thread count.
/// The first exception thrown by any task is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int thread_count() { return omp_get_max_threads(); }

}  // namespace decay
