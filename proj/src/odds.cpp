#include "stoprule/odds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stoprule/errors.hpp"

namespace stoprule {

template <class Scalar>
BasicOddsVector<Scalar>::BasicOddsVector(std::vector<Scalar> p) : p_(std::move(p)) {
  for (std::size_t j = 0; j < p_.size(); ++j) {
    const auto& pj = p_[j];
    if (!(pj >= Scalar(0) && pj < Scalar(1))) {
      throw ValidationError("odds vector entry " + std::to_string(j + 1) + " must lie in [0,1), got " +
                            std::to_string(to_double(pj)));
    }
  }
}

template <class Scalar>
BasicOddsSolution<Scalar> solve_odds(const BasicOddsVector<Scalar>& odds) {
  const std::size_t m = odds.size();
  if (m == 0) throw DomainError("solve_odds needs at least one indicator");
  if constexpr (!std::is_same_v<Scalar, double>) {
    if (m > 64) throw CapacityError("exact odds mode supports at most 64 indicators");
  }
  const Scalar one(1);
  const Scalar threshold = one - odds_tolerance<Scalar>();

  BasicOddsSolution<Scalar> sol;
  sol.reversed_cumulative.resize(m);
  Scalar acc(0);
  for (std::size_t k = 1; k <= m; ++k) {
    acc += odds.r(m - k);
    sol.reversed_cumulative[k - 1] = acc;
    if (!sol.crossing_index && acc >= threshold) sol.crossing_index = k;
  }
  sol.sum_odds = acc;

  // s is the largest k with r_k + ... + r_m >= 1: exactly m - t + 1.
  sol.s = sol.crossing_index ? m - *sol.crossing_index + 1 : 1;

  Scalar q_product(1);
  Scalar odds_sum(0);
  for (std::size_t j = sol.s; j <= m; ++j) {
    q_product *= odds.q(j - 1);
    odds_sum += odds.r(j - 1);
  }
  sol.v = q_product * odds_sum;

  if (sol.crossing_index) {
    const std::size_t t = *sol.crossing_index;
    Scalar reversed_q(1);
    for (std::size_t k = 1; k <= t; ++k) reversed_q *= odds.q(m - k);
    sol.reversed_form_value = sol.reversed_cumulative[t - 1] * reversed_q;
  }
  return sol;
}

template <class Scalar>
Scalar last_success_value(std::span<const Scalar> p) {
  const Scalar one(1);
  std::ptrdiff_t last_sure = -1;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] >= Scalar(0) && p[j] <= one))
      throw ValidationError("success probability " + std::to_string(j + 1) + " must lie in [0,1]");
    if (p[j] == one) last_sure = static_cast<std::ptrdiff_t>(j);
  }
  const auto rest = p.subspan(static_cast<std::size_t>(last_sure + 1));
  Scalar continue_value(0);
  if (!rest.empty()) {
    continue_value = solve_odds(BasicOddsVector<Scalar>(std::vector<Scalar>(rest.begin(), rest.end()))).v;
  }
  if (last_sure < 0) return continue_value;
  Scalar stop_on_sure(1);
  for (const auto& pj : rest) stop_on_sure *= one - pj;
  return std::max(stop_on_sure, continue_value);
}

double bound_b(long long n) {
  if (n < 1) throw DomainError("bound_b requires n >= 1");
  if (n == 1) return 1.0;
  const double nd = static_cast<double>(n);
  return std::exp((nd - 1.0) * std::log1p(-1.0 / nd));
}

Rational bound_b_exact(long long n) {
  if (n < 1) throw DomainError("bound_b requires n >= 1");
  const Rational base(n - 1, n);
  Rational out(1);
  for (long long i = 0; i < n - 1; ++i) out *= base;
  return out;
}

template <class Scalar>
BasicOddsBoundReport<Scalar> verify_odds_bounds(const BasicOddsVector<Scalar>& odds) {
  const auto sol = solve_odds(odds);
  const Scalar tol = odds_tolerance<Scalar>();
  BasicOddsBoundReport<Scalar> report;
  report.sum_odds = sol.sum_odds;
  report.v = sol.v;
  const auto m = static_cast<long long>(odds.size());
  if constexpr (std::is_same_v<Scalar, double>) {
    report.bound = bound_b(m + 1);
  } else {
    report.bound = bound_b_exact(m + 1);
  }
  report.applicable = sol.sum_odds >= Scalar(1) - tol;
  if (report.applicable) {
    report.bound_holds = sol.v >= report.bound - tol;
    report.exceeds_inverse_e = to_double(sol.v) > std::exp(-1.0);
  }
  const Scalar gap = sol.v - report.bound;
  report.attained = (gap >= -tol) && (gap <= tol);
  return report;
}

OddsSolution classical_secretary_value(long long n) {
  if (n < 1) throw DomainError("classical secretary problem requires n >= 1");
  if (n == 1) {
    OddsSolution sol;
    sol.s = 1;
    sol.v = 1.0;
    sol.sum_odds = std::numeric_limits<double>::infinity();
    return sol;
  }
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(n - 1));
  for (long long i = 2; i <= n; ++i) p.push_back(1.0 / static_cast<double>(i));
  auto sol = solve_odds(OddsVector(std::move(p)));
  sol.s += 1;
  return sol;
}

template class BasicOddsVector<double>;
template class BasicOddsVector<Rational>;
template BasicOddsSolution<double> solve_odds(const BasicOddsVector<double>&);
template BasicOddsSolution<Rational> solve_odds(const BasicOddsVector<Rational>&);
template double last_success_value(std::span<const double>);
template Rational last_success_value(std::span<const Rational>);
template BasicOddsBoundReport<double> verify_odds_bounds(const BasicOddsVector<double>&);
template BasicOddsBoundReport<Rational> verify_odds_bounds(const BasicOddsVector<Rational>&);

}  // namespace stoprule
