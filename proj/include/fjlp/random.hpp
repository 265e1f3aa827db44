#pragma once

// Counter-based hashing for reproducible sign diagonals and per-trial seeds,
// plus a small deterministic parallel_for.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fjlp {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// h(a, b, c) = mix64(mix64(mix64(a) ^ b) ^ c). Pure integer arithmetic, so
// the value is identical on every platform.
constexpr std::uint64_t hash3(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) noexcept {
  return mix64(mix64(mix64(a) ^ b) ^ c);
}

// Domain tag separating per-trial seeds from sign streams 1..3.
inline constexpr std::uint64_t kTrialDomain = 0x747269616cULL;  // "trial"

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return hash3(master, kTrialDomain, trial);
}

/// Fills `out` with the Rademacher signs of stream `stream`: entry j is -1 iff
/// bit (j mod 64) of hash3(seed, stream, j / 64) is set.
inline void rademacher_signs(std::uint64_t seed, std::uint64_t stream,
                             std::vector<double>& out, std::size_t n) {
  out.resize(n);
  for (std::size_t base = 0; base < n; base += 64) {
    const std::uint64_t word = hash3(seed, stream, base >> 6);
    const std::size_t len = std::min<std::size_t>(64, n - base);
    for (std::size_t b = 0; b < len; ++b)
      out[base + b] = 1.0 - 2.0 * static_cast<double>((word >> b) & 1U);
  }
}

// FJLP_THREADS overrides std::thread::hardware_concurrency().
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("FJLP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

/// Calls fn(i) for i in [0, n). Work is split into contiguous chunks; any
/// per-index result must be written to slot i so the outcome does not depend
/// on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fjlp
