#pragma once

#include <random>

#include "stoprule/distributions.hpp"
#include "stoprule/odds.hpp"
#include "stoprule/reduction.hpp"

namespace stoprule::gen {

using Rng = std::mt19937_64;

/// m uniform in [1, max_m], each p_j uniform in [0.005, 0.9).
OddsVector random_odds_vector(Rng& rng, std::size_t max_m);

/// m uniform in [1, max_m], each p_j = a/d with 1 <= a < d <= max_den.
ExactOddsVector random_exact_odds_vector(Rng& rng, std::size_t max_m, int max_den = 24);

/// Uniform, piecewise-linear, or two-lobed piecewise law with a flat gap.
Distribution random_continuous_distribution(Rng& rng);

/// n uniform in [min_n, max_n] random atomless laws.
ProblemInstance random_continuous_instance(Rng& rng, std::size_t max_n, std::size_t min_n = 2);

/// n uniform in [2, max_n]; a_i = i - 1, b_i = -(i - 1); p_i = a/d with
/// 0 <= a <= d <= max_den, so sure and impossible successes occur.
ExactVSequence random_exact_v_sequence(Rng& rng, std::size_t max_n, int max_den = 12);

/// Small finite-support instance: n in [1, max_n], up to max_support integer atoms each.
ExactDiscreteInstance random_exact_discrete_instance(Rng& rng, std::size_t max_n, std::size_t max_support);

}  // namespace stoprule::gen
