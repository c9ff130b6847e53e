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

namespace sselab {

/// Worker count: `requested` when positive, else SSELAB_THREADS, else the
/// hardware concurrency. SSELAB_THREADS also caps an explicit request.
inline unsigned resolve_threads(unsigned requested = 0) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned cap = 0;
  if (const char* env = std::getenv("SSELAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) cap = static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned n = requested > 0 ? requested : (cap > 0 ? cap : hw);
  if (cap > 0) n = std::min(n, cap);
  return std::max(1u, n);
}

/// Runs fn(i) for i in [0, count) on `threads` workers. Work is claimed
/// dynamically; callers write results into per-index slots so the outcome does
/// not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sselab
