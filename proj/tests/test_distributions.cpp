#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stoprule/distributions.hpp"
#include "stoprule/errors.hpp"
#include "stoprule/generators.hpp"
#include "stoprule/instance_io.hpp"

using namespace stoprule;

namespace {

/// Kolmogorov-Smirnov distance between draws and the analytic CDF, valid for
/// laws with atoms: both one-sided limits are compared at every sample value.
double ks_statistic(const Distribution& d, std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < draws.size();) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    const double left = d.cdf(std::nextafter(draws[i], -INFINITY));
    worst = std::max({worst, std::abs(upto - d.cdf(draws[i])), std::abs(below - left)});
    i = j;
  }
  return worst;
}

std::vector<double> draw(const Distribution& d, std::uint64_t seed, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    RandomStream s(seed, t);
    out.push_back(sample(d, s));
  }
  return out;
}

Distribution random_law(gen::Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  switch (pick(rng)) {
    case 0: {
      const int n = std::uniform_int_distribution<int>(1, 9)(rng);
      return Distribution::extremal_component(n, std::uniform_int_distribution<int>(1, n)(rng));
    }
    case 1: {
      const double lo = u(rng);
      return Distribution::two_point(lo, lo + 0.1 + std::abs(u(rng)), std::uniform_real_distribution<double>(0, 1)(rng));
    }
    case 2:
      return Distribution::point_mass(u(rng));
    default:
      return gen::random_continuous_distribution(rng);
  }
}

}  // namespace

TEST_CASE("cdf examples") {
  CHECK(evaluate_cdf(Distribution::uniform(0, 1), 0.5) == doctest::Approx(0.5));
  CHECK(evaluate_cdf(Distribution::extremal_component(3, 2), 0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(evaluate_cdf(Distribution::two_point(-1, 2, 1.0 / 3.0), 0.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cdf rejects non-finite arguments and invalid laws") {
  CHECK_THROWS_AS(evaluate_cdf(Distribution::uniform(0, 1), NAN), DomainError);
  CHECK_THROWS_AS(evaluate_cdf(Distribution::uniform(1, 0), 0.5), ValidationError);
  CHECK_THROWS_AS(evaluate_cdf(Distribution::two_point(0, 1, 1.5), 0.5), ValidationError);
  CHECK_THROWS_AS(evaluate_cdf(Distribution::two_point(1, 0, 0.5), 0.5), ValidationError);
  CHECK_THROWS_AS(evaluate_cdf(Distribution::extremal_component(3, 4), 0.5), ValidationError);
  CHECK_THROWS_AS(evaluate_cdf(Distribution::piecewise_linear({{0, 0}, {1, 0.2}, {2, 0.1}, {3, 1}}), 0.5),
                  ValidationError);
}

TEST_CASE("quantile examples") {
  CHECK(quantile(Distribution::uniform(2, 4), 0.25) == doctest::Approx(2.5));
  CHECK(quantile(Distribution::extremal_component(3, 2), 2.0 / 3.0) == doctest::Approx(-1.0));
  CHECK(quantile(Distribution::two_point(0, 1, 0.5), 0.5) == 0.0);
  CHECK_THROWS_AS(quantile(Distribution::uniform(0, 1), 1.5), DomainError);
  CHECK_THROWS_AS(quantile(Distribution::uniform(0, 1), -0.1), DomainError);
}

TEST_CASE("sampling examples") {
  RandomStream s(7, 3);
  CHECK(sample(Distribution::point_mass(3.0), s) == 3.0);

  const auto u = draw(Distribution::uniform(0, 1), 11, 1'000'000);
  double mean = 0.0;
  for (double x : u) mean += x;
  mean /= static_cast<double>(u.size());
  CHECK(std::abs(mean - 0.5) < 0.002);

  const std::size_t n = 200'000;
  const auto e = draw(Distribution::extremal_component(5, 3), 12, n);
  const double above = static_cast<double>(std::count_if(e.begin(), e.end(), [](double x) { return x > 0; })) / n;
  CHECK(std::abs(above - 0.2) <= 3.0 * std::sqrt(0.2 * 0.8 / n));
}

TEST_CASE("identical seed and stream give identical draws") {
  const auto d = Distribution::piecewise_linear({{0, 0}, {1, 0.3}, {4, 1}});
  RandomStream a(99, 5), b(99, 5), c(99, 6);
  for (int i = 0; i < 10; ++i) {
    const double x = sample(d, a);
    CHECK(x == sample(d, b));
    CHECK(x != sample(d, c));
  }
}

TEST_CASE("extremal family") {
  CHECK_THROWS_AS(make_extremal_instance(0), DomainError);

  const auto one = make_extremal_instance(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].support().lo == 0.0);
  CHECK(one[0].support().hi == 1.0);
  CHECK(one[0].cdf(0.25) == doctest::Approx(0.25));

  // Component 2 of n = 3: density 2/3 on (-2,-1) and 1/3 on (2,3).
  const auto d = Distribution::extremal_component(3, 2);
  CHECK(d.cdf(-2.0) == 0.0);
  CHECK(d.cdf(-1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(d.cdf(-1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(d.cdf(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(d.cdf(2.5) == doctest::Approx(2.0 / 3.0 + 1.0 / 6.0));
  CHECK(d.cdf(3.0) == 1.0);

  SUBCASE("supports are pairwise disjoint") {
    const auto inst = make_extremal_instance(6);
    std::vector<std::pair<double, double>> pieces{{0, 1}};
    for (int i = 2; i <= 6; ++i) {
      pieces.push_back({-i, -i + 1});
      pieces.push_back({i, i + 1});
    }
    std::sort(pieces.begin(), pieces.end());
    for (std::size_t k = 1; k < pieces.size(); ++k) CHECK(pieces[k].first >= pieces[k - 1].second);
  }

  SUBCASE("branch masses sum to one exactly") {
    for (int n = 2; n <= 12; ++n) {
      for (int i = 2; i <= n; ++i) {
        const auto c = Distribution::extremal_component(n, i);
        CHECK(c.cdf(-i + 1.0) == doctest::Approx(static_cast<double>(n - 1) / n).epsilon(1e-15));
        CHECK(c.cdf(i + 1.0) == 1.0);
        CHECK(c.cdf(-static_cast<double>(i)) == 0.0);
      }
    }
  }
}

TEST_CASE("validate_instance") {
  const auto empty = validate_instance(ProblemInstance{});
  CHECK_FALSE(empty.ok);
  REQUIRE(empty.violations.size() == 1);
  CHECK(empty.violations[0].message == "n must be >= 1");

  const auto decreasing = validate_instance(
      ProblemInstance({Distribution::piecewise_linear({{0, 0}, {1, 0.6}, {2, 0.4}, {3, 1}})}));
  CHECK_FALSE(decreasing.ok);
  REQUIRE_FALSE(decreasing.violations.empty());
  CHECK(decreasing.violations[0].index == 0);
  CHECK(decreasing.violations[0].message.find("monotonicity") != std::string::npos);

  const auto mixed =
      validate_instance(ProblemInstance({Distribution::uniform(0, 1), Distribution::two_point(0, 1, 0.5)}));
  CHECK(mixed.ok);
  CHECK_FALSE(mixed.all_continuous);

  CHECK(validate_instance(make_extremal_instance(4)).all_continuous);
  CHECK_THROWS_AS(require_valid(ProblemInstance{}), ValidationError);
}

TEST_CASE("random parameterizations: monotone CDF and quantile inverse") {
  gen::Rng rng(2718);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto d = random_law(rng);
    REQUIRE(d.valid());
    const auto sup = d.support();
    const double lo = sup.lo - 0.5, hi = sup.hi + 0.5;
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = lo + (hi - lo) * i / 1000.0;
      const double f = d.cdf(x);
      CHECK(f >= prev);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      prev = f;
    }
    if (d.has_atoms()) continue;
    for (int i = 1; i < 200; ++i) {
      const double x = sup.lo + (sup.hi - sup.lo) * i / 200.0;
      const double f = d.cdf(x);
      // Inside a zero-density stretch the generalized inverse returns its left end.
      const bool flat = d.cdf(x - 1e-7) == f || d.cdf(x + 1e-7) == f;
      if (!flat) CHECK(std::abs(d.quantile(f) - x) <= 1e-9 * std::max(1.0, std::abs(x)));
      const double u = i / 200.0;
      CHECK(std::abs(d.cdf(d.quantile(u)) - u) <= 1e-12);
    }
  }
}

TEST_CASE("Kolmogorov-Smirnov against the analytic CDF for each kind") {
  const std::size_t n = 100'000;
  const double critical = 1.95 / std::sqrt(static_cast<double>(n));  // 0.001 level
  const std::vector<Distribution> laws{
      Distribution::uniform(-1, 3),
      Distribution::two_point(0, 5, 0.3),
      Distribution::piecewise_linear({{0, 0}, {1, 0.5}, {3, 0.5}, {4, 1}}),
      Distribution::extremal_component(5, 3),
      Distribution::point_mass(2.0),
      Distribution::discrete({{0, 0.2}, {1, 0.5}, {4, 0.3}}),
  };
  std::uint64_t seed = 100;
  for (const auto& d : laws) {
    CAPTURE(to_string(d.kind()));
    CHECK(ks_statistic(d, draw(d, seed++, n)) < critical);
  }
}

TEST_CASE("json round trip") {
  const ProblemInstance inst({Distribution::uniform(0, 2), Distribution::two_point(-1, 1, 0.25),
                              Distribution::piecewise_linear({{0, 0}, {1, 0.4}, {2, 1}}),
                              Distribution::extremal_component(4, 3), Distribution::point_mass(0.5),
                              Distribution::discrete({{0, 0.5}, {2, 0.5}})});
  const auto back = instance_from_json(to_json(inst));
  REQUIRE(back.size() == inst.size());
  for (std::size_t j = 0; j < inst.size(); ++j) {
    CHECK(back[j].kind() == inst[j].kind());
    for (double x : {-3.0, -0.5, 0.0, 0.3, 1.0, 1.7, 3.5}) CHECK(back[j].cdf(x) == inst[j].cdf(x));
  }
  CHECK_THROWS_WITH_AS(instance_from_json(nlohmann::json::parse(R"({"distributions":[{"kind":"gamma"}]})")),
                       "distribution 0: unknown kind 'gamma'", ValidationError);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"distributions":[{"kind":"uniform","low":0}]})")),
                  ValidationError);
}
