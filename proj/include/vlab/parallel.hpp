#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

namespace vlab {

int worker_count();
void set_worker_count(int n);

/// Applies VLAB_THREADS (if set) as the worker cap. Returns the resulting count.
int apply_thread_env();

/// Runs body(p) for p in [0, n) across OpenMP workers with a static
/// schedule. If several paths throw, the exception of the lowest path index
/// is rethrown, so the reported failure does not depend on the worker count.
template <class Body>
void parallel_paths(std::size_t n, Body&& body) {
  std::exception_ptr first_error;
  std::size_t first_path = std::numeric_limits<std::size_t>::max();
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < count; ++p) {
    try {
      body(static_cast<std::size_t>(p));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (static_cast<std::size_t>(p) < first_path) {
        first_path = static_cast<std::size_t>(p);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vlab
