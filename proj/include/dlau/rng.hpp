#pragma once

#include <cstdint>

namespace dlau {

/// SplitMix64 (Steele, Lea & Flood 2014), the repository's pinned generator.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Derived draws use only the high bits so every language reproduces them
/// bit for bit.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits: (next() >> 11) * 2^-53.
  constexpr double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-0.5, 0.5) with 24 bits, exact in float:
  /// (next() >> 40) * 2^-24 - 0.5.
  constexpr float uniform_centered() {
    return static_cast<float>(static_cast<double>(next() >> 40) * 0x1.0p-24 - 0.5);
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace dlau
