#pragma once

#include <optional>
#include <vector>

#include "stoprule/distributions.hpp"
#include "stoprule/oracle.hpp"
#include "stoprule/policy.hpp"
#include "stoprule/rational.hpp"

namespace stoprule {

/// Y_1 = a_1 surely; Y_i (i >= 2) is a_i with probability p_i and b_i otherwise,
/// with a_1 < a_2 < ... < a_n and a_1 > b_2 > ... > b_n.
template <class Scalar>
struct BasicVSequence {
  std::vector<double> a;       ///< a_1..a_n
  std::vector<double> b;       ///< b_2..b_n
  std::vector<Scalar> p_high;  ///< P(Y_i = a_i), i = 2..n

  [[nodiscard]] std::size_t n() const { return a.size(); }
  /// Throws ValidationError on size mismatches, ordering violations or bad probabilities.
  void validate() const;
};

using VSequence = BasicVSequence<double>;
using ExactVSequence = BasicVSequence<Rational>;

/// Stop-now and continue values at Y_1 = a_1.
template <class Scalar>
struct VSequenceBranches {
  Scalar stop{};      ///< prod (1 - p_i): no later observation beats a_1
  Scalar cont{};      ///< last-success value of the indicators {Y_i = a_i}
};

template <class Scalar>
VSequenceBranches<Scalar> v_sequence_branches(const BasicVSequence<Scalar>& v);

/// max(stop, continue); never below (1 - 1/n)^(n-1).
template <class Scalar>
Scalar v_sequence_value(const BasicVSequence<Scalar>& v);

/// The V-sequence as a finite-support instance (zero-probability atoms dropped).
template <class Scalar>
BasicDiscreteInstance<Scalar> to_discrete_instance(const BasicVSequence<Scalar>& v);

/// c_i for i = 2..n-1: a point above x1_star with
/// U_i(c_i) P(X_i > x1_star) = int_{x1_star}^inf U_i dF_i.
/// When P(X_i > x1_star) vanishes or U_i is already 1 at x1_star, c_i = x1_star + 1.
std::vector<double> compute_c_constants(const ProblemInstance& instance, double x1_star,
                                        const EngineConfig& cfg = {});

struct ReductionReport {
  double x1_star = 0.0;
  /// Width of the indifference interval starting at x1_star (nonzero for the extremal family).
  double ambiguity_width = 0.0;
  std::vector<double> c;  ///< c_2..c_{n-1}
  VSequence v_sequence;
  double value_original = 0.0;
  double value_reduced = 0.0;
  bool inequality_holds = false;
  /// Exact DP value of the discrete V-sequence (verify_reduction only).
  std::optional<double> oracle_value;
  bool oracle_agrees = true;
};

/// Builds the two-point sequence X'_1 = x1*, X'_i = a_i if X_i > x1* else b_i,
/// with a_i spaced below min c_i, and evaluates both problems.
ReductionReport build_v_sequence(const PolicySolution& solution, const EngineConfig& cfg = {});
ReductionReport build_v_sequence(const ProblemInstance& instance, const EngineConfig& cfg = {});

/// build_v_sequence plus an exact-oracle cross-check of the reduced value.
ReductionReport verify_reduction(const ProblemInstance& instance, const EngineConfig& cfg = {});

extern template struct BasicVSequence<double>;
extern template struct BasicVSequence<Rational>;
extern template VSequenceBranches<double> v_sequence_branches(const BasicVSequence<double>&);
extern template VSequenceBranches<Rational> v_sequence_branches(const BasicVSequence<Rational>&);
extern template double v_sequence_value(const BasicVSequence<double>&);
extern template Rational v_sequence_value(const BasicVSequence<Rational>&);
extern template BasicDiscreteInstance<double> to_discrete_instance(const BasicVSequence<double>&);
extern template BasicDiscreteInstance<Rational> to_discrete_instance(const BasicVSequence<Rational>&);

}  // namespace stoprule
