#include "stoprule/checks.hpp"

#include <cmath>
#include <sstream>

#include "stoprule/generators.hpp"
#include "stoprule/odds.hpp"
#include "stoprule/oracle.hpp"
#include "stoprule/reduction.hpp"

namespace stoprule {
namespace {

constexpr double kOddsTolerance = 1e-12;
constexpr double kBoundTolerance = 1e-3;
constexpr double kMonotoneTolerance = 1e-8;

class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }

  void record(bool ok, const std::string& what) {
    ++result_.cases;
    if (ok) return;
    if (result_.failures++ == 0) result_.detail = what;
  }

  CheckResult finish(std::string summary = {}) {
    result_.passed = result_.failures == 0;
    if (result_.passed) result_.detail = std::move(summary);
    return result_;
  }

 private:
  CheckResult result_;
};

template <class... Parts>
std::string describe(const Parts&... parts) {
  std::ostringstream os;
  os.precision(12);
  (os << ... << parts);
  return os.str();
}

CheckResult check_bounds_table() {
  Tally t("bounds_table");
  const double inv_e = std::exp(-1.0);
  double prev = bound_b(1);
  t.record(prev > inv_e, "b_1 <= 1/e");
  for (long long n = 2; n <= 10'000; ++n) {
    const double b = bound_b(n);
    t.record(b < prev && b > inv_e, describe("b_", n, " = ", b, " breaks the ordering"));
    prev = b;
  }
  const double far = bound_b(1'000'000);
  t.record(std::abs(far - inv_e) <= 1e-6, describe("b_1e6 - 1/e = ", far - inv_e));
  return t.finish(describe("b_1e6 - 1/e = ", far - inv_e));
}

CheckResult check_odds_bound(gen::Rng& rng, std::size_t count) {
  Tally t("odds_bound");
  const double inv_e = std::exp(-1.0);
  std::size_t accepted = 0;
  while (accepted < count) {
    const auto odds = gen::random_odds_vector(rng, 12);
    const auto sol = solve_odds(odds);
    if (sol.sum_odds < 1.0) continue;
    ++accepted;
    const double b = bound_b(static_cast<long long>(odds.size()) + 1);
    t.record(sol.v >= b - kOddsTolerance && sol.v > inv_e,
             describe("m = ", odds.size(), ": v = ", sol.v, " < b_{m+1} = ", b));
    if (sol.reversed_form_value) {
      t.record(std::abs(*sol.reversed_form_value - sol.v) <= kOddsTolerance,
               describe("reversed form ", *sol.reversed_form_value, " != ", sol.v));
    }
  }
  return t.finish();
}

CheckResult check_extremal(const EngineConfig& cfg) {
  Tally t("extremal_attainment");
  for (int n : {2, 3, 5, 8}) {
    const double v = optimal_value(make_extremal_instance(n), cfg);
    t.record(std::abs(v - bound_b(n)) <= kBoundTolerance, describe("n = ", n, ": V = ", v, ", b_n = ", bound_b(n)));
  }
  return t.finish();
}

void check_continuous(gen::Rng& rng, const CheckOptions& opt, std::vector<CheckResult>& out) {
  Tally bound("engine_bound");
  Tally monotone("threshold_monotonicity");
  Tally reduction("reduction_inequality");
  double worst_slack = INFINITY;
  for (std::size_t i = 0; i < opt.continuous_instances; ++i) {
    const auto instance = gen::random_continuous_instance(rng, 8);
    const auto sol = solve_policy(instance, opt.engine);
    const double b = bound_b(static_cast<long long>(instance.size()));
    worst_slack = std::min(worst_slack, sol.value - b);
    bound.record(sol.value >= b - kBoundTolerance, describe("instance ", i, ": V = ", sol.value, " < b_n = ", b));
    monotone.record(sol.policy.monotonicity_violation() <= kMonotoneTolerance && !sol.policy.any_saturated(),
                    describe("instance ", i, ": thresholds rise by ", sol.policy.monotonicity_violation()));
    const auto report = build_v_sequence(sol, opt.engine);
    const auto exact = oracle_optimal_value(to_exact(to_discrete_instance(report.v_sequence)));
    const bool agrees = std::abs(to_double(exact.value) - report.value_reduced) <= kOddsTolerance;
    reduction.record(report.inequality_holds && agrees,
                     describe("instance ", i, ": original ", report.value_original, ", reduced ",
                              report.value_reduced, ", oracle ", to_double(exact.value)));
  }
  out.push_back(bound.finish(describe("min V - b_n = ", worst_slack)));
  out.push_back(monotone.finish());
  out.push_back(reduction.finish());
}

CheckResult check_v_sequences(gen::Rng& rng, std::size_t count) {
  Tally t("v_sequence_oracle");
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = gen::random_exact_v_sequence(rng, 6);
    const Rational formula = v_sequence_value(v);
    const Rational dp = oracle_optimal_value(to_discrete_instance(v)).value;
    const Rational b = bound_b_exact(static_cast<long long>(v.n()));
    t.record(formula == dp && formula >= b,
             describe("n = ", v.n(), ": formula ", formula, ", oracle ", dp));
  }
  return t.finish();
}

CheckResult check_pruning(gen::Rng& rng, std::size_t count) {
  Tally t("oracle_pruning");
  OracleOptions naive;
  naive.prune_non_candidates = false;
  for (std::size_t i = 0; i < count; ++i) {
    const auto inst = gen::random_exact_discrete_instance(rng, 5, 4);
    const Rational fast = oracle_optimal_value(inst).value;
    const Rational slow = oracle_optimal_value(inst, naive).value;
    t.record(fast == slow, describe("pruned ", fast, " != unpruned ", slow));
  }
  return t.finish();
}

}  // namespace

std::vector<CheckResult> run_property_checks(const CheckOptions& options) {
  options.engine.validate();
  gen::Rng rng(options.seed);
  std::vector<CheckResult> out;
  out.push_back(check_bounds_table());
  out.push_back(check_odds_bound(rng, options.odds_vectors));
  out.push_back(check_extremal(options.engine));
  check_continuous(rng, options, out);
  out.push_back(check_v_sequences(rng, options.v_sequences));
  out.push_back(check_pruning(rng, 200));
  return out;
}

}  // namespace stoprule
