#include "hardattn/rng.hpp"

#include "hardattn/error.hpp"

namespace hardattn {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw InvalidArgument("RngStream::uniform_int: hi < lo");
  const std::uint64_t span = hi - lo;
  if (span == ~0ULL) return next_u64();
  const std::uint64_t range = span + 1;
  // Largest multiple of range that fits; draws at or above it are rejected.
  const std::uint64_t limit = ~0ULL - (~0ULL % range);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + x % range;
}

bool RngStream::bit() { return (next_u64() >> 63) != 0; }

RngStream RngStream::derive(std::uint64_t stream_id) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL)));
}

}  // namespace hardattn
