#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ultraflat {

// Worker cap: ULTRAFLAT_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
inline std::size_t thread_budget() {
  if (const char* env = std::getenv("ULTRAFLAT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count). Each index must write only its own
// output slot; the assignment of indices to threads does not affect results.
// The first exception thrown by any body is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t count, const Body& body,
                  std::size_t max_threads = thread_budget()) {
  const std::size_t workers = std::min(count, std::max<std::size_t>(1, max_threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ultraflat
