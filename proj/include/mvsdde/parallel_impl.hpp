#pragma once

#include <exception>
#include <mutex>

namespace mvsdde::detail {

// Exceptions thrown inside the loop body are captured and the one from the
// lowest index is rethrown, so error reporting is schedule-independent.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  std::exception_ptr error;
  std::size_t error_index = count;
  std::mutex guard;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(static) num_threads(::mvsdde::num_threads())
  for (long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < error_index) {
        error_index = static_cast<std::size_t>(i);
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mvsdde::detail
