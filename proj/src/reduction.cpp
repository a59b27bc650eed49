#include "stoprule/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stoprule/errors.hpp"
#include "stoprule/odds.hpp"

namespace stoprule {

template <class Scalar>
void BasicVSequence<Scalar>::validate() const {
  const std::size_t count = a.size();
  if (count < 1) throw ValidationError("V-sequence needs n >= 1");
  if (b.size() + 1 != count || p_high.size() + 1 != count)
    throw ValidationError("V-sequence needs n values a, n-1 values b and n-1 probabilities");
  for (std::size_t i = 1; i < count; ++i) {
    if (!(a[i] > a[i - 1])) throw ValidationError("V-sequence requires a_1 < a_2 < ... < a_n");
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double above = i == 0 ? a[0] : b[i - 1];
    if (!(b[i] < above)) throw ValidationError("V-sequence requires a_1 > b_2 > ... > b_n");
  }
  for (const auto& p : p_high) {
    if (!(p >= Scalar(0) && p <= Scalar(1))) throw ValidationError("V-sequence probabilities must lie in [0,1]");
  }
}

template <class Scalar>
VSequenceBranches<Scalar> v_sequence_branches(const BasicVSequence<Scalar>& v) {
  v.validate();
  VSequenceBranches<Scalar> out;
  out.stop = Scalar(1);
  for (const auto& p : v.p_high) out.stop *= Scalar(1) - p;
  out.cont = last_success_value(std::span<const Scalar>(v.p_high));
  return out;
}

template <class Scalar>
Scalar v_sequence_value(const BasicVSequence<Scalar>& v) {
  const auto br = v_sequence_branches(v);
  return std::max(br.stop, br.cont);
}

template <class Scalar>
BasicDiscreteInstance<Scalar> to_discrete_instance(const BasicVSequence<Scalar>& v) {
  v.validate();
  using Atoms = typename BasicDiscreteInstance<Scalar>::AtomList;
  std::vector<Atoms> vars;
  vars.push_back(Atoms{{v.a[0], Scalar(1)}});
  for (std::size_t i = 0; i < v.p_high.size(); ++i) {
    Atoms atoms;
    const Scalar& p = v.p_high[i];
    if (p < Scalar(1)) atoms.push_back({v.b[i], Scalar(1) - p});
    if (p > Scalar(0)) atoms.push_back({v.a[i + 1], p});
    vars.push_back(std::move(atoms));
  }
  return BasicDiscreteInstance<Scalar>(std::move(vars));
}

std::vector<double> compute_c_constants(const ProblemInstance& instance, double x1_star, const EngineConfig& cfg) {
  cfg.validate();
  require_valid(instance);
  if (!instance.all_continuous()) throw ContinuityError("c constants need an atomless instance");
  if (!std::isfinite(x1_star)) throw DomainError("x1_star must be finite");
  const std::size_t n = instance.size();

  auto later_product = [&](std::size_t i, double x) {
    double out = 1.0;
    for (std::size_t j = n; j > i; --j) out *= instance[j - 1].cdf(x);
    return out;
  };

  std::vector<double> c;
  for (std::size_t i = 2; i + 1 <= n; ++i) {
    const Distribution& d = instance[i - 1];
    const double mass_above = 1.0 - d.cdf(x1_star);
    const double u_at_star = later_product(i, x1_star);
    if (mass_above <= cfg.tail_epsilon || u_at_star >= 1.0 - cfg.tie_tolerance) {
      c.push_back(x1_star + 1.0);
      continue;
    }
    const QuantileRule rule(d, cfg.grid_points);
    const double integral = rule.tail_integral(x1_star, [&](double x) { return later_product(i, x); });
    const double target = std::clamp(integral / mass_above, u_at_star, 1.0);
    const double level = target + cfg.tie_tolerance;

    // Right end of the level set {U_i <= target}; any point of it solves the
    // balance equation, and the right end leaves the most room for a_i.
    double top = x1_star + 1.0;
    for (std::size_t j = i + 1; j <= n; ++j) top = std::max(top, instance[j - 1].support().hi);
    if (later_product(i, top) <= level) {
      c.push_back(top);
      continue;
    }
    double lo = x1_star;
    double hi = top;
    while (hi - lo > cfg.threshold_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (later_product(i, mid) <= level) lo = mid;
      else hi = mid;
    }
    c.push_back(lo > x1_star ? lo : hi);
  }
  return c;
}

ReductionReport build_v_sequence(const PolicySolution& solution, const EngineConfig& cfg) {
  const ProblemInstance& instance = solution.curves.instance();
  const std::size_t n = instance.size();
  if (n < 2) throw DomainError("reduction needs n >= 2");

  ReductionReport report;
  report.x1_star = solution.policy.thresholds.front();
  report.ambiguity_width = solution.policy.ambiguity_width.front();
  report.c = compute_c_constants(instance, report.x1_star, cfg);

  double delta = 1.0;
  if (!report.c.empty()) {
    delta = *std::min_element(report.c.begin(), report.c.end()) - report.x1_star;
  }
  const double x1 = report.x1_star;
  const double nd = static_cast<double>(n);
  VSequence& vs = report.v_sequence;
  vs.a.push_back(x1);
  for (std::size_t i = 2; i <= n; ++i) {
    const double step = delta * static_cast<double>(i - 1) / nd;
    vs.a.push_back(x1 + step);
    vs.b.push_back(x1 - step);
    vs.p_high.push_back(1.0 - instance[i - 1].cdf(x1));
  }
  vs.validate();
  for (std::size_t i = 2; i + 1 <= n; ++i) {
    if (vs.a[i - 1] > report.c[i - 2]) throw ValidationError("constructed a_i exceeds c_i");
  }

  report.value_original = solution.value;
  report.value_reduced = v_sequence_value(vs);
  report.inequality_holds = report.value_original >= report.value_reduced - cfg.value_tolerance;
  return report;
}

ReductionReport build_v_sequence(const ProblemInstance& instance, const EngineConfig& cfg) {
  if (instance.size() < 2) throw DomainError("reduction needs n >= 2");
  return build_v_sequence(solve_policy(instance, cfg), cfg);
}

ReductionReport verify_reduction(const ProblemInstance& instance, const EngineConfig& cfg) {
  auto report = build_v_sequence(instance, cfg);
  const auto oracle = oracle_optimal_value(to_discrete_instance(report.v_sequence));
  report.oracle_value = oracle.value;
  report.oracle_agrees = std::abs(oracle.value - report.value_reduced) <= 1e-12;
  return report;
}

template struct BasicVSequence<double>;
template struct BasicVSequence<Rational>;
template VSequenceBranches<double> v_sequence_branches(const BasicVSequence<double>&);
template VSequenceBranches<Rational> v_sequence_branches(const BasicVSequence<Rational>&);
template double v_sequence_value(const BasicVSequence<double>&);
template Rational v_sequence_value(const BasicVSequence<Rational>&);
template BasicDiscreteInstance<double> to_discrete_instance(const BasicVSequence<double>&);
template BasicDiscreteInstance<Rational> to_discrete_instance(const BasicVSequence<Rational>&);

}  // namespace stoprule
