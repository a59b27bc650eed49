#pragma once

#include <cstdint>

#include "stoprule/distributions.hpp"
#include "stoprule/policy.hpp"

namespace stoprule {

struct SimConfig {
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  /// Work is split into this many contiguous trial ranges. Results do not depend on it.
  unsigned parallel_chunks = 1;
  /// Upper bound on worker threads; 0 picks the hardware concurrency.
  unsigned max_threads = 0;

  void validate() const;
};

struct SimReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t wins = 0;
};

/// Trial i draws X_j from RandomStream(seed, i) in order j = 1..n and plays
/// the threshold rule; the estimate is the fraction of wins.
SimReport simulate_win_probability(const ProblemInstance& instance, const ThresholdPolicy& policy,
                                   const SimConfig& cfg);

/// Binomial summary of `wins` out of `trials`: sqrt(p(1-p)/trials) and
/// p +- 1.96 stderr clamped to [0,1].
SimReport summarize_wins(std::uint64_t wins, std::uint64_t trials, std::uint64_t seed);

}  // namespace stoprule
