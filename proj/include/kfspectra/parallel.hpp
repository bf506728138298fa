#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kfspectra {

/// Worker count: hardware concurrency, capped by SPECTRA_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("SPECTRA_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1)
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception &) {
    }
  }
  return n;
}

/// Calls body(i) for i in [0, count). Each index writes only its own output
/// slot, so results are independent of scheduling. The first exception is
/// rethrown after all workers finish.
template <class Body> void parallel_for(std::size_t count, Body &&body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
              error = std::current_exception();
          }
        }
      });
  }
  if (error)
    std::rethrow_exception(error);
}

} // namespace kfspectra
