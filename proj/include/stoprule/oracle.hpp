#pragma once

#include <cstddef>
#include <vector>

#include "stoprule/distributions.hpp"
#include "stoprule/policy.hpp"
#include "stoprule/rational.hpp"

namespace stoprule {

template <class Scalar>
struct BasicAtom {
  double value = 0.0;
  Scalar prob{};
};

/// Independent finite-support variables. Atoms are sorted by value and equal
/// values merged; probabilities lie in (0,1] and sum to 1 (exactly for the
/// rational instantiation, within 1e-12 otherwise).
template <class Scalar>
class BasicDiscreteInstance {
 public:
  using AtomList = std::vector<BasicAtom<Scalar>>;

  explicit BasicDiscreteInstance(std::vector<AtomList> variables);

  [[nodiscard]] std::size_t size() const { return variables_.size(); }
  [[nodiscard]] const AtomList& variable(std::size_t j) const { return variables_[j]; }
  [[nodiscard]] const std::vector<AtomList>& variables() const { return variables_; }
  [[nodiscard]] std::size_t total_support() const;

 private:
  std::vector<AtomList> variables_;
};

using DiscreteInstance = BasicDiscreteInstance<double>;
using ExactDiscreteInstance = BasicDiscreteInstance<Rational>;

/// Atom lists of a problem instance whose members all have finite support.
DiscreteInstance to_discrete(const ProblemInstance& instance);
/// Same values, probabilities converted exactly from their binary doubles.
ExactDiscreteInstance to_exact(const DiscreteInstance& instance);

/// Stopping region at one step. Stopping on candidate value `atom` given the
/// previous running maximum m is optimal iff atom is listed and m <= atom;
/// prior_maxima lists the attainable m (empty at step 1, where m = -inf).
struct StopSet {
  std::vector<double> atoms;
  std::vector<double> prior_maxima;

  [[nodiscard]] bool contains(double current_max, double atom) const;
};

template <class Scalar>
struct BasicOracleResult {
  Scalar value{};
  bool exact = false;
  std::vector<StopSet> stop_sets;  ///< one per step 1..n
};

using OracleResult = BasicOracleResult<double>;
using ExactOracleResult = BasicOracleResult<Rational>;

struct OracleOptions {
  /// Limit on (sum of support sizes) * n.
  std::size_t capacity = 1'000'000;
  /// Only consider stopping on candidates. The unpruned recursion also
  /// allows stopping on non-candidates; it exists to test the pruning.
  bool prune_non_candidates = true;
};

/// Exact optimal win probability by backward induction over (step, running
/// maximum). Ties with the overall maximum count as wins.
template <class Scalar>
BasicOracleResult<Scalar> oracle_optimal_value(const BasicDiscreteInstance<Scalar>& instance,
                                               const OracleOptions& options = {});

/// Exact win probability of a fixed threshold rule.
template <class Scalar>
Scalar oracle_policy_value(const BasicDiscreteInstance<Scalar>& instance, const ThresholdPolicy& policy,
                           const OracleOptions& options = {});

/// Probabilities of the events A_i = {X_i >= max(X_1..X_{i-1})} and of their
/// pairwise intersections, by enumerating every path.
template <class Scalar>
struct CandidateEvents {
  std::vector<Scalar> marginal;             ///< P(A_i), i = 1..n
  std::vector<std::vector<Scalar>> joint;   ///< P(A_i and A_j)
};

template <class Scalar>
CandidateEvents<Scalar> candidate_events(const BasicDiscreteInstance<Scalar>& instance,
                                         std::size_t max_paths = 1'000'000);

extern template class BasicDiscreteInstance<double>;
extern template class BasicDiscreteInstance<Rational>;
extern template BasicOracleResult<double> oracle_optimal_value(const BasicDiscreteInstance<double>&,
                                                               const OracleOptions&);
extern template BasicOracleResult<Rational> oracle_optimal_value(const BasicDiscreteInstance<Rational>&,
                                                                 const OracleOptions&);
extern template double oracle_policy_value(const BasicDiscreteInstance<double>&, const ThresholdPolicy&,
                                           const OracleOptions&);
extern template Rational oracle_policy_value(const BasicDiscreteInstance<Rational>&, const ThresholdPolicy&,
                                             const OracleOptions&);
extern template CandidateEvents<double> candidate_events(const BasicDiscreteInstance<double>&, std::size_t);
extern template CandidateEvents<Rational> candidate_events(const BasicDiscreteInstance<Rational>&, std::size_t);

}  // namespace stoprule
