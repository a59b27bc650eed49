#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stoprule/policy.hpp"

namespace stoprule {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string detail;  ///< first failure, or a summary figure
};

struct CheckOptions {
  std::uint64_t seed = 20240601;
  std::size_t continuous_instances = 100;
  std::size_t odds_vectors = 1000;
  std::size_t v_sequences = 500;
  EngineConfig engine;
};

/// Bounds table, odds bound, engine bound and monotonicity on random
/// instances, the reduction inequality, and oracle equivalences.
std::vector<CheckResult> run_property_checks(const CheckOptions& options = {});

}  // namespace stoprule
