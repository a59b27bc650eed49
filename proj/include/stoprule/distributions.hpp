#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "stoprule/random.hpp"

namespace stoprule {

enum class DistributionKind {
  uniform,
  two_point,
  piecewise_linear_cdf,
  extremal_component,
  point_mass,
  discrete,
};

std::string to_string(DistributionKind kind);

struct UniformLaw {
  double low = 0.0;
  double high = 1.0;
};

/// Takes high_value with probability p_high and low_value otherwise.
struct TwoPointLaw {
  double low_value = 0.0;
  double high_value = 1.0;
  double p_high = 0.5;
};

struct Knot {
  double x = 0.0;
  double cdf = 0.0;
};

/// Continuous law whose CDF interpolates linearly between knots. The first
/// knot carries CDF 0 and the last CDF 1.
struct PiecewiseLinearLaw {
  std::vector<Knot> knots;
};

/// Component `index` of the disjoint-support family on n observations that
/// attains the lower bound. Index 1 is uniform on (0,1); index i >= 2 puts
/// density (n-1)/n on (-i, -i+1) and 1/n on (i, i+1).
struct ExtremalComponentLaw {
  int n = 1;
  int index = 1;
};

struct PointMassLaw {
  double value = 0.0;
};

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

/// Finite-support law; atoms are kept sorted by value.
struct DiscreteLaw {
  std::vector<Atom> atoms;
};

struct Support {
  double lo = 0.0;
  double hi = 0.0;
};

/// An observation law. Construction never throws: problems are recorded in
/// violations() and surface as ValidationError the first time the law is
/// evaluated. Immutable after construction.
class Distribution {
 public:
  using Law = std::variant<UniformLaw, TwoPointLaw, PiecewiseLinearLaw, ExtremalComponentLaw,
                           PointMassLaw, DiscreteLaw>;

  explicit Distribution(Law law);

  static Distribution uniform(double low, double high);
  static Distribution two_point(double low_value, double high_value, double p_high);
  static Distribution piecewise_linear(std::vector<Knot> knots);
  static Distribution extremal_component(int n, int index);
  static Distribution point_mass(double value);
  static Distribution discrete(std::vector<Atom> atoms);

  [[nodiscard]] DistributionKind kind() const;
  [[nodiscard]] const Law& law() const { return law_; }

  [[nodiscard]] bool valid() const { return violations_.empty(); }
  [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }
  /// Throws ValidationError listing the violations, if any.
  void check() const;

  [[nodiscard]] bool has_atoms() const;

  [[nodiscard]] double cdf(double x) const;
  /// Generalized inverse inf{x : F(x) >= u}; u = 0 maps to the lower support bound.
  [[nodiscard]] double quantile(double u) const;
  [[nodiscard]] Support support() const;

  /// Points where the density of a continuous law changes, including both
  /// support ends. The CDF is linear between consecutive breakpoints.
  /// For atomic laws, the atom locations.
  [[nodiscard]] std::vector<double> breakpoints() const;

  /// Atom list of a finite-support law (two_point, point_mass, discrete).
  /// Zero-probability atoms are dropped. Throws ValidationError for continuous laws.
  [[nodiscard]] std::vector<Atom> atoms() const;

 private:
  Law law_;
  std::vector<std::string> violations_;
};

double evaluate_cdf(const Distribution& d, double x);
double quantile(const Distribution& d, double u);
double sample(const Distribution& d, RandomStream& stream);

/// Ordered list of independent observation laws X_1..X_n.
class ProblemInstance {
 public:
  ProblemInstance() = default;
  explicit ProblemInstance(std::vector<Distribution> distributions)
      : distributions_(std::move(distributions)) {}

  [[nodiscard]] std::size_t size() const { return distributions_.size(); }
  [[nodiscard]] bool empty() const { return distributions_.empty(); }
  [[nodiscard]] const Distribution& operator[](std::size_t i) const { return distributions_[i]; }
  [[nodiscard]] const std::vector<Distribution>& distributions() const { return distributions_; }
  [[nodiscard]] bool all_continuous() const;

  auto begin() const { return distributions_.begin(); }
  auto end() const { return distributions_.end(); }

 private:
  std::vector<Distribution> distributions_;
};

struct Violation {
  std::ptrdiff_t index = -1;  ///< 0-based distribution index; -1 for instance-level problems
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  bool all_continuous = false;
  std::vector<Violation> violations;
};

ValidationReport validate_instance(const ProblemInstance& instance);

/// Throws ValidationError unless the instance is non-empty and every member is valid.
void require_valid(const ProblemInstance& instance);

/// [extremal_component(n,1), ..., extremal_component(n,n)].
ProblemInstance make_extremal_instance(int n);

}  // namespace stoprule
