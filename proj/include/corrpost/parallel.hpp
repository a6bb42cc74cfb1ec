#pragma once

#include <exception>
#include <mutex>

namespace corrpost {

/// Selects the serial reference loop or its OpenMP counterpart. Both produce
/// bit-identical results: parallel loops only fill independent slots.
enum class Exec { Serial, Parallel };

/// Number of OpenMP threads a parallel region would use (1 without OpenMP).
int max_threads();
void set_threads(int n);

/// Runs body(i) for i in [0, count) across OpenMP threads. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(int count, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace corrpost
