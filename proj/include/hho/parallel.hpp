#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hho {

/// Selects the OpenMP kernel or its serial reference.
enum class Execution { serial, parallel };

/// Calls fn(i) for i in [0, n). Iterations must be independent and write to
/// disjoint outputs; the parallel and serial paths then produce identical
/// results. The first exception thrown by any iteration is rethrown.
template <class Fn>
void for_each_index(Execution exec, std::size_t n, Fn&& fn)
{
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace hho
