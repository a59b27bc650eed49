#include "stoprule/generators.hpp"

#include <algorithm>

namespace stoprule::gen {
namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Strictly increasing CDF levels 0 = F_0 < ... < F_k = 1.
std::vector<double> increasing_levels(Rng& rng, std::size_t knots) {
  std::vector<double> w(knots - 1);
  for (auto& x : w) x = uniform(rng, 0.05, 1.0);
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> f{0.0};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    acc += w[i] / total;
    f.push_back(acc);
  }
  f.push_back(1.0);
  return f;
}

}  // namespace

OddsVector random_odds_vector(Rng& rng, std::size_t max_m) {
  std::vector<double> p(pick(rng, 1, max_m));
  for (auto& x : p) x = uniform(rng, 0.005, 0.9);
  return OddsVector(std::move(p));
}

ExactOddsVector random_exact_odds_vector(Rng& rng, std::size_t max_m, int max_den) {
  std::vector<Rational> p(pick(rng, 1, max_m));
  for (auto& x : p) {
    const int den = static_cast<int>(pick(rng, 2, static_cast<std::size_t>(max_den)));
    const int num = static_cast<int>(pick(rng, 1, static_cast<std::size_t>(den - 1)));
    x = Rational(num, den);
  }
  return ExactOddsVector(std::move(p));
}

Distribution random_continuous_distribution(Rng& rng) {
  const double shift = uniform(rng, -1.0, 1.0);
  switch (pick(rng, 0, 2)) {
    case 0:
      return Distribution::uniform(shift, shift + uniform(rng, 0.2, 3.0));
    case 1: {
      const std::size_t k = pick(rng, 2, 6);
      const auto f = increasing_levels(rng, k);
      std::vector<Knot> knots;
      double x = shift;
      for (std::size_t i = 0; i < k; ++i) {
        knots.push_back({x, f[i]});
        x += uniform(rng, 0.05, 1.0);
      }
      return Distribution::piecewise_linear(std::move(knots));
    }
    default: {
      // Two lobes separated by a zero-density gap.
      const double low_mass = uniform(rng, 0.1, 0.9);
      const double a = shift;
      const double b = a + uniform(rng, 0.1, 1.0);
      const double c = b + uniform(rng, 0.5, 4.0);
      const double d = c + uniform(rng, 0.1, 1.0);
      return Distribution::piecewise_linear({{a, 0.0}, {b, low_mass}, {c, low_mass}, {d, 1.0}});
    }
  }
}

ProblemInstance random_continuous_instance(Rng& rng, std::size_t max_n, std::size_t min_n) {
  std::vector<Distribution> ds;
  const std::size_t n = pick(rng, min_n, max_n);
  for (std::size_t j = 0; j < n; ++j) ds.push_back(random_continuous_distribution(rng));
  return ProblemInstance(std::move(ds));
}

ExactVSequence random_exact_v_sequence(Rng& rng, std::size_t max_n, int max_den) {
  const std::size_t n = pick(rng, 2, max_n);
  ExactVSequence v;
  v.a.push_back(0.0);
  for (std::size_t i = 2; i <= n; ++i) {
    v.a.push_back(static_cast<double>(i - 1));
    v.b.push_back(-static_cast<double>(i - 1));
    const int den = static_cast<int>(pick(rng, 1, static_cast<std::size_t>(max_den)));
    const int num = static_cast<int>(pick(rng, 0, static_cast<std::size_t>(den)));
    v.p_high.emplace_back(num, den);
  }
  return v;
}

ExactDiscreteInstance random_exact_discrete_instance(Rng& rng, std::size_t max_n, std::size_t max_support) {
  const std::size_t n = pick(rng, 1, max_n);
  std::vector<ExactDiscreteInstance::AtomList> vars;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t s = pick(rng, 1, max_support);
    std::vector<int> values;
    while (values.size() < s) {
      const int v = static_cast<int>(pick(rng, 0, 6));
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    std::vector<int> weights(s);
    int total = 0;
    for (auto& w : weights) total += (w = static_cast<int>(pick(rng, 1, 5)));
    ExactDiscreteInstance::AtomList atoms;
    for (std::size_t i = 0; i < s; ++i) atoms.push_back({static_cast<double>(values[i]), Rational(weights[i], total)});
    vars.push_back(std::move(atoms));
  }
  return ExactDiscreteInstance(std::move(vars));
}

}  // namespace stoprule::gen
