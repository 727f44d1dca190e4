#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace efcg {

using Rng = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling. Unlike
// std::uniform_int_distribution, the output is identical on every standard
// library. Requires n >= 1.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// Uniform integer in [lo, hi]. Requires lo <= hi.
inline std::int64_t uniform_between(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_below(rng, span));
}

// FNV-1a of key mixed into base through a splitmix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t base, std::string_view key) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = base ^ h;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace efcg
