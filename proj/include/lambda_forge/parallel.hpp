#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace lf {

enum class Execution { serial, parallel };

/// Thread cap for Execution::parallel; 0 means the OpenMP default.
void set_max_jobs(int jobs);
int max_jobs();

/// out[i] = f(i) for i in [0, n). Output order never depends on scheduling.
/// The first exception thrown by any f(i) is rethrown after the loop.
template <class F>
auto parallel_map(std::size_t n, F&& f, Execution exec = Execution::parallel)
    -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  const int threads = max_jobs() > 0 ? max_jobs() : omp_get_max_threads();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lf_parallel_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace lf
