#include "stoprule/random.hpp"

namespace stoprule {
namespace {

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double RandomStream::uniform_at(std::uint64_t counter) const {
  // SplitMix64 with random access; mix() adds the first gamma increment itself.
  // Each (seed, stream) pair starts at an independent hashed offset.
  constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
  const std::uint64_t start = mix(mix(seed_) + mix(~stream_));
  const std::uint64_t bits = mix(start + counter * gamma);
  // 53 random bits, shifted by half an ulp so 0 and 1 are never produced.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace stoprule
