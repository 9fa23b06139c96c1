#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace permkit {

/// Worker-pool width: min(requested, hardware, PERMKIT_THREADS).
/// requested == 0 means "as many as allowed".
inline unsigned resolve_threads(unsigned requested) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned cap = hw;
  if (const char* env = std::getenv("PERMKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = std::min<unsigned>(cap, static_cast<unsigned>(v));
  }
  if (requested == 0) requested = cap;
  return std::max(1u, std::min(requested, cap));
}

/// Runs fn(i) for i in [0, n) on a pool of worker threads. Output written
/// into per-index slots is deterministic regardless of the pool width.
inline void parallel_for(uint64_t n, unsigned threads, const std::function<void(uint64_t)>& fn) {
  const unsigned t = resolve_threads(threads);
  if (t <= 1 || n < 2) {
    for (uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const uint64_t chunk = (n + t - 1) / t;
  for (unsigned w = 0; w < t; ++w) {
    const uint64_t lo = w * chunk;
    const uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (uint64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace permkit
