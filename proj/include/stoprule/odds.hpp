#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stoprule/rational.hpp"

namespace stoprule {

/// Comparison slack used by the floating-point odds routines. The rational
/// instantiations compare exactly.
inline constexpr double kOddsTolerance = 1e-12;

template <class Scalar>
Scalar odds_tolerance() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return kOddsTolerance;
  } else {
    return Scalar(0);
  }
}

/// Success probabilities p_1..p_m of independent indicators, each in [0,1).
/// A sure success (p = 1) has infinite odds and is rejected; callers drop the
/// prefix up to the last sure success themselves (see last_success_value).
template <class Scalar>
class BasicOddsVector {
 public:
  explicit BasicOddsVector(std::vector<Scalar> p);

  [[nodiscard]] std::size_t size() const { return p_.size(); }
  [[nodiscard]] const std::vector<Scalar>& p() const { return p_; }
  [[nodiscard]] Scalar q(std::size_t j) const { return Scalar(1) - p_[j]; }
  [[nodiscard]] Scalar r(std::size_t j) const { return p_[j] / q(j); }

 private:
  std::vector<Scalar> p_;
};

template <class Scalar>
struct BasicOddsSolution {
  std::size_t s = 1;  ///< 1-based index from which to stop on the first success
  Scalar v{};         ///< optimal probability of stopping on the last success
  Scalar sum_odds{};
  /// R_k = r_m + r_{m-1} + ... + r_{m-k+1}, i.e. odds accumulated from the end.
  std::vector<Scalar> reversed_cumulative;
  /// First k with R_k >= 1 (1-based), if any. When present, s = m - t + 1.
  std::optional<std::size_t> crossing_index;
  /// R_t * q_m * ... * q_{m-t+1}; equals v whenever crossing_index is set.
  std::optional<Scalar> reversed_form_value;
};

using OddsVector = BasicOddsVector<double>;
using ExactOddsVector = BasicOddsVector<Rational>;
using OddsSolution = BasicOddsSolution<double>;
using ExactOddsSolution = BasicOddsSolution<Rational>;

/// Optimal rule and value for stopping on the last success.
/// s is the largest k whose tail odds sum r_k + ... + r_m reaches 1 (or 1 when
/// none does) and v = (q_s ... q_m)(r_s + ... + r_m).
template <class Scalar>
BasicOddsSolution<Scalar> solve_odds(const BasicOddsVector<Scalar>& odds);

/// Optimal last-success probability for p_j in [0,1]. Sure successes are
/// handled by dropping everything before the last one: from there the choice
/// is between stopping on it and solving the remaining tail.
template <class Scalar>
Scalar last_success_value(std::span<const Scalar> p);

/// (1 - 1/n)^(n-1), with b_1 = 1.
double bound_b(long long n);
Rational bound_b_exact(long long n);

template <class Scalar>
struct BasicOddsBoundReport {
  Scalar sum_odds{};
  Scalar v{};
  Scalar bound{};  ///< b_{m+1}
  bool applicable = false;  ///< sum of odds >= 1
  bool bound_holds = true;  ///< v >= b_{m+1} - tol (vacuously true when not applicable)
  bool exceeds_inverse_e = true;  ///< v > 1/e (vacuously true when not applicable)
  bool attained = false;    ///< v == b_{m+1} within tolerance
};

using OddsBoundReport = BasicOddsBoundReport<double>;
using ExactOddsBoundReport = BasicOddsBoundReport<Rational>;

template <class Scalar>
BasicOddsBoundReport<Scalar> verify_odds_bounds(const BasicOddsVector<Scalar>& odds);

/// Classical no-information secretary problem on n applicants, solved through
/// the odds of "applicant i is best so far" (p_i = 1/i). For n >= 2 index 1 is
/// omitted (p_1 = 1) and the returned s refers to applicant numbers 2..n.
OddsSolution classical_secretary_value(long long n);

extern template class BasicOddsVector<double>;
extern template class BasicOddsVector<Rational>;
extern template BasicOddsSolution<double> solve_odds(const BasicOddsVector<double>&);
extern template BasicOddsSolution<Rational> solve_odds(const BasicOddsVector<Rational>&);
extern template double last_success_value(std::span<const double>);
extern template Rational last_success_value(std::span<const Rational>);
extern template BasicOddsBoundReport<double> verify_odds_bounds(const BasicOddsVector<double>&);
extern template BasicOddsBoundReport<Rational> verify_odds_bounds(const BasicOddsVector<Rational>&);

}  // namespace stoprule
