#include "stoprule/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "stoprule/errors.hpp"
#include "stoprule/random.hpp"

namespace stoprule {

void SimConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (parallel_chunks < 1) throw ValidationError("parallel_chunks must be >= 1");
}

SimReport summarize_wins(std::uint64_t wins, std::uint64_t trials, std::uint64_t seed) {
  SimReport r;
  r.trials = trials;
  r.seed = seed;
  r.wins = wins;
  r.estimate = static_cast<double>(wins) / static_cast<double>(trials);
  r.standard_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
  r.ci95_lo = std::clamp(r.estimate - 1.96 * r.standard_error, 0.0, 1.0);
  r.ci95_hi = std::clamp(r.estimate + 1.96 * r.standard_error, 0.0, 1.0);
  return r;
}

SimReport simulate_win_probability(const ProblemInstance& instance, const ThresholdPolicy& policy,
                                   const SimConfig& cfg) {
  cfg.validate();
  require_valid(instance);
  if (policy.n() != instance.size()) throw DomainError("policy length does not match the instance");

  const std::size_t n = instance.size();
  const std::uint64_t chunks = std::min<std::uint64_t>(cfg.parallel_chunks, cfg.trials);
  const std::uint64_t per_chunk = cfg.trials / chunks;
  const std::uint64_t remainder = cfg.trials % chunks;
  auto chunk_begin = [&](std::uint64_t c) { return c * per_chunk + std::min(c, remainder); };

  std::vector<std::uint64_t> wins(chunks, 0);
  auto run_chunk = [&](std::uint64_t c) {
    std::vector<double> path(n);
    std::uint64_t count = 0;
    for (std::uint64_t t = chunk_begin(c); t < chunk_begin(c + 1); ++t) {
      RandomStream stream(cfg.seed, t);
      for (std::size_t j = 0; j < n; ++j) path[j] = sample(instance[j], stream);
      if (run_policy(policy, path).won) ++count;
    }
    wins[c] = count;
  };

  unsigned threads = cfg.max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.max_threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  std::uint64_t total = 0;
  for (auto w : wins) total += w;
  return summarize_wins(total, cfg.trials, cfg.seed);
}

}  // namespace stoprule
