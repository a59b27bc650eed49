#pragma once

#include <cstdint>

namespace stoprule {

/// Counter-based uniform stream. Draw j of stream i is a pure function of
/// (seed, i, j), so results never depend on how work is split across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Uniform on the open interval (0, 1) at an explicit counter position.
  [[nodiscard]] double uniform_at(std::uint64_t counter) const;

  /// Next uniform in sequence; advances the counter.
  double next_uniform() { return uniform_at(counter_++); }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }
  [[nodiscard]] std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace stoprule
