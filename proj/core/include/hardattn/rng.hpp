#pragma once

#include <cstdint>
#include <random>

namespace hardattn {

/// Seeded random stream with a platform-independent sample sequence.
///
/// The engine is std::mt19937_64, whose output sequence the C++ standard pins
/// exactly. Standard distributions are implementation-defined, so every
/// derived quantity (uniform doubles, bounded integers, bits) is computed here
/// from raw 64-bit outputs. Child streams are seeded through splitmix64 so
/// that streams derived from neighbouring seeds are decorrelated.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix64-v1";

  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  bool bit();

  /// Independent child stream; the same (seed, stream_id) always yields the same child.
  RngStream derive(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace hardattn
