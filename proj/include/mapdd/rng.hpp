#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mapdd {

/// Instance generation draws from std::mt19937_64 (its output sequence is
/// fixed by the C++ standard) through the rejection sampler below rather
/// than std::uniform_int_distribution, whose algorithm is implementation
/// defined. Together they make instances reproducible across toolchains.
using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi], both inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(rng());  // full 64-bit span
  // 2^64 mod range values at the bottom are rejected so every residue is
  // equally likely.
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x < threshold);
  return lo + static_cast<std::int64_t>(x % range);
}

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace mapdd
