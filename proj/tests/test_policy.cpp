#include <doctest.h>

#include <cmath>

#include "reference.hpp"
#include "stoprule/errors.hpp"
#include "stoprule/generators.hpp"
#include "stoprule/odds.hpp"
#include "stoprule/policy.hpp"

using namespace stoprule;

namespace {

ProblemInstance iid_uniform(int n) {
  return ProblemInstance(std::vector<Distribution>(static_cast<std::size_t>(n), Distribution::uniform(0, 1)));
}

/// Midpoint rule in quantile space, far finer than the engine grid.
double fine_tail_integral(const Distribution& d, double from, const std::function<double(double)>& f) {
  const int steps = 20'000;
  const double lo = d.cdf(from);
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double u = lo + (1.0 - lo) * (i + 0.5) / steps;
    acc += f(d.quantile(u));
  }
  return acc * (1.0 - lo) / steps;
}

}  // namespace

TEST_CASE("engine configuration is validated") {
  EngineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.grid_points = 8;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.tail_epsilon = 1e-2;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.threshold_tolerance = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("value curves for i.i.d. uniform observations") {
  SUBCASE("n = 2") {
    const auto curves = compute_value_curves(iid_uniform(2));
    const auto& g = curves.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] < 0 || g[i] > 1) continue;
      CHECK(std::abs(curves.U(1)[i] - g[i]) <= 1e-6);
      CHECK(std::abs(curves.W(1)[i] - (1 - g[i])) <= 1e-6);
    }
  }
  SUBCASE("n = 3 against the hand-integrated continuation value") {
    const auto curves = compute_value_curves(iid_uniform(3));
    const auto& g = curves.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] < 0 || g[i] > 1) continue;
      CHECK(std::abs(curves.U(1)[i] - g[i] * g[i]) <= 1e-12);
      CHECK(std::abs(curves.W(1)[i] - reference::iid_uniform::w1_n3(g[i])) <= 1e-4);
    }
  }
}

TEST_CASE("U_k is the exact product of later CDFs on the grid") {
  gen::Rng rng(404);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 6);
    const auto curves = compute_value_curves(inst);
    for (std::size_t k = 1; k < inst.size(); ++k) {
      for (std::size_t i = 0; i < curves.grid().size(); i += 7) {
        double prod = 1.0;
        for (std::size_t j = k; j < inst.size(); ++j) prod *= inst[j].cdf(curves.grid()[i]);
        CHECK(std::abs(curves.U(k)[i] - prod) <= 1e-12);
      }
    }
  }
}

TEST_CASE("extremal n = 3 stop curve is flat on the first support") {
  const auto curves = compute_value_curves(make_extremal_instance(3));
  for (double x : {0.01, 0.25, 0.5, 0.75, 0.99}) CHECK(curves.u_at(1, x) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("threshold and value examples") {
  const auto two = solve_policy(iid_uniform(2));
  REQUIRE(two.policy.thresholds.size() == 1);
  CHECK(std::abs(two.policy.thresholds[0] - 0.5) <= 1e-6);
  CHECK(std::abs(two.value - 0.75) <= 1e-6);

  const auto three = solve_policy(iid_uniform(3));
  REQUIRE(three.policy.thresholds.size() == 2);
  CHECK(std::abs(three.policy.thresholds[0] - reference::iid_uniform::x1_star_n3()) <= 1e-5);
  CHECK(std::abs(three.policy.thresholds[1] - 0.5) <= 1e-6);
  CHECK(std::abs(three.value - 0.68428) <= 1e-4);
  CHECK(std::abs(three.value - reference::iid_uniform::value_n3()) <= 1e-5);

  const auto one = solve_policy(iid_uniform(1));
  CHECK(one.policy.thresholds.empty());
  CHECK(one.value == 1.0);

  CHECK(std::abs(optimal_value(make_extremal_instance(5)) - 0.4096) <= 1e-4);
}

TEST_CASE("heterogeneous two-step instance solved by hand") {
  // X_1 ~ U(0,1), X_2 ~ U(0,2): stopping at x wins with x/2, continuing with 1 - x/2,
  // so the rule never stops early and wins with P(X_2 > X_1) = 3/4.
  const auto sol = solve_policy(ProblemInstance({Distribution::uniform(0, 1), Distribution::uniform(0, 2)}));
  CHECK(std::abs(sol.value - 0.75) <= 1e-6);
  CHECK(sol.policy.thresholds[0] >= 1.0 - 1e-6);
}

TEST_CASE("engine rejects laws with atoms and degenerate input") {
  CHECK_THROWS_AS(compute_value_curves(ProblemInstance({Distribution::uniform(0, 1), Distribution::point_mass(0.5)})),
                  ContinuityError);
  CHECK_THROWS_AS(optimal_value(ProblemInstance{}), ValidationError);
  EngineConfig bad;
  bad.grid_points = 4;
  CHECK_THROWS_AS(optimal_value(iid_uniform(2), bad), ValidationError);
}

TEST_CASE("run_policy examples") {
  ThresholdPolicy p;
  p.thresholds = {0.5};
  p.saturated = {false};
  p.ambiguity_width = {0.0};

  auto r = run_policy(p, std::vector<double>{0.6, 0.9});
  CHECK(r.stop_index == 1);
  CHECK(r.stopped_value == 0.6);
  CHECK_FALSE(r.won);

  r = run_policy(p, std::vector<double>{0.3, 0.8});
  CHECK(r.stop_index == 2);
  CHECK(r.stopped_value == 0.8);
  CHECK(r.won);

  r = run_policy(p, std::vector<double>{0.5, 0.4});
  CHECK(r.stop_index == 1);
  CHECK(r.won);

  CHECK_THROWS_AS(run_policy(p, std::vector<double>{0.1, 0.2, 0.3}), DomainError);
}

TEST_CASE("stop and continue curves cross at the thresholds") {
  gen::Rng rng(8080);
  const EngineConfig cfg;
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 8);
    const auto curves = compute_value_curves(inst, cfg);
    const auto policy = compute_thresholds(curves, cfg);
    for (std::size_t k = 1; k < inst.size(); ++k) {
      const double x = policy.thresholds[k - 1];
      const double slack = 1e-6;
      for (std::size_t i = 0; i < curves.grid().size(); ++i) {
        const double g = curves.grid()[i];
        const double diff = curves.U(k)[i] - curves.W(k)[i];
        if (g > x + slack) CHECK(diff >= -cfg.tie_tolerance);
        if (g < x - slack) CHECK(diff <= cfg.tie_tolerance);
      }
    }
  }
}

TEST_CASE("recursion residual is within 5 / grid_points") {
  gen::Rng rng(1234);
  const EngineConfig cfg;
  const double allowed = 5.0 / cfg.grid_points;
  for (int rep = 0; rep < 4; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 5, 3);
    const auto curves = compute_value_curves(inst, cfg);
    const auto& g = curves.grid();
    for (std::size_t k = 1; k + 1 < inst.size(); ++k) {
      const auto& next = inst[k];
      for (std::size_t i = 1; i + 1 < g.size(); i += g.size() / 12) {
        const double m = g[i];
        const double tail = fine_tail_integral(next, m, [&](double x) {
          return std::max(curves.u_at(k + 1, x), curves.w_at(k + 1, x));
        });
        const double residual = curves.W(k)[i] - next.cdf(m) * curves.w_at(k + 1, m) - tail;
        CHECK(std::abs(residual) <= allowed);
      }
    }
  }
}

TEST_CASE("random heterogeneous instances: monotone thresholds and the lower bound") {
  gen::Rng rng(20240601);
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 8);
    const auto sol = solve_policy(inst);
    CAPTURE(rep);
    CHECK_FALSE(sol.policy.any_saturated());
    CHECK(sol.policy.monotonicity_violation() <= EngineConfig{}.threshold_tolerance);
    CHECK(sol.value >= bound_b(static_cast<long long>(inst.size())) - 1e-3);
    CHECK(sol.value <= 1.0);
  }
}

TEST_CASE("engine agrees with a discretised dynamic program") {
  gen::Rng rng(99);
  for (int rep = 0; rep < 8; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 5);
    std::vector<std::function<double(double)>> q;
    for (const auto& d : inst) q.push_back([d](double u) { return d.quantile(u); });
    const double approx = reference::discretised_optimal_value(q, 800);
    CAPTURE(rep);
    CHECK(std::abs(optimal_value(inst) - approx) <= 1e-3);
  }
}

TEST_CASE("doubling the grid moves the value by at most 2e-4") {
  EngineConfig fine;
  fine.grid_points = 4096;
  std::vector<ProblemInstance> cases{iid_uniform(2), iid_uniform(3)};
  for (int n : {2, 3, 5, 8}) cases.push_back(make_extremal_instance(n));
  for (const auto& inst : cases) CHECK(std::abs(optimal_value(inst) - optimal_value(inst, fine)) <= 2e-4);
}
