#pragma once

// Data-parallel map used by every sweep-shaped kernel in the library.
//
// The parallel path evaluates items with OpenMP into a pre-sized output
// vector, so results land at their input index no matter which thread
// finished first. Any reduction over the results is done afterwards, in
// index order, which keeps parallel and serial runs bit-identical.

#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

#include <omp.h>

namespace qreflect {

enum class Execution { Serial, Parallel };

/// Plain loop; the reference every parallel kernel is tested against.
template <class T, class F>
std::vector<T> serial_map(std::size_t n, F&& f) {
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

/// OpenMP map. If several items throw, the exception from the lowest index
/// is rethrown so the failure reported does not depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(guided)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(qreflect_parallel_map_error)
      {
        if (static_cast<std::size_t>(i) < first_index) {
          first_index = static_cast<std::size_t>(i);
          first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

template <class T, class F>
std::vector<T> map_indexed(std::size_t n, F&& f, Execution execution) {
  if (execution == Execution::Parallel && n > 1 && !omp_in_parallel())
    return parallel_map<T>(n, static_cast<F&&>(f));
  return serial_map<T>(n, static_cast<F&&>(f));
}

/// Number of OpenMP worker threads used by parallel kernels.
inline void set_worker_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace qreflect
