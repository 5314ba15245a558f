#pragma once

#include <cstdint>

namespace varboot {

/// SplitMix64 stream (Steele/Lea/Flood; Vigna's fixed-increment variant).
/// Counter-based substreams are derived by hashing (key, index) pairs, so a
/// replicate's stream depends only on its own key — parallel and serial
/// execution produce identical draws.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw on [0, 1) with 53 random mantissa bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw on the open interval (0, 1), safe for inverse-cdf sampling.
  double next_uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  std::uint64_t state_;
};

/// Finalizer used for key mixing (one SplitMix64 output step, stateless).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the seed of substream `index` under `base_seed`.
inline std::uint64_t derive_stream(std::uint64_t base_seed, std::uint64_t index) {
  return mix64(mix64(base_seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace varboot
