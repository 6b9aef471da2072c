// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace glassforge {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based hash of (seed, a, b); no state, so any evaluation order
/// yields the same value.
constexpr std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t h = mix64(seed + golden);
  h = mix64(h ^ (a * golden + 0x632BE59BD9B4E019ULL));
  h = mix64(h ^ (b * 0xD1B54A32D192ED03ULL + golden));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

/// Sequential splitmix64 stream, used for per-sample parameter draws.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }
  constexpr double uniform() { return to_unit(next()); }
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Seed of sample `index` under `master_seed`.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return hash_counter(master_seed, index, 0x5EEDULL);
}

}  // namespace glassforge
