#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stoprule/distributions.hpp"

namespace stoprule {

enum class Quadrature {
  trapezoid_quantile,  ///< composite trapezoid in u = F(x)
};

struct EngineConfig {
  int grid_points = 2048;
  double tail_epsilon = 1e-9;
  double threshold_tolerance = 1e-10;
  Quadrature quadrature = Quadrature::trapezoid_quantile;
  /// |U - W| at or below this is treated as indifference when locating thresholds.
  double tie_tolerance = 1e-9;
  /// Slack allowed when comparing two engine-computed win probabilities.
  double value_tolerance = 1e-6;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// Trapezoid nodes of one continuous law in probability space. Each piece
/// between consecutive breakpoints gets about grid_points * mass uniform
/// steps in u; the CDF is linear on a piece, so the x-nodes are uniform there
/// too. Flat stretches of the CDF appear as zero-width cells.
class QuantileRule {
 public:
  QuantileRule(const Distribution& d, int grid_points);

  [[nodiscard]] const std::vector<double>& levels() const { return levels_; }
  [[nodiscard]] const std::vector<double>& points() const { return points_; }

  /// Approximates the integral of f dF over (from, +inf).
  [[nodiscard]] double tail_integral(double from, const std::function<double(double)>& f) const;

 private:
  std::vector<double> levels_;
  std::vector<double> points_;
};

/// Tabulated U_k (win probability of stopping on a candidate of value x at
/// step k) and W_k (best win probability from continuing with running
/// maximum x) for k = 1..n-1 on one shared grid.
class ValueCurves {
 public:
  [[nodiscard]] std::size_t n() const { return instance_.size(); }
  [[nodiscard]] const ProblemInstance& instance() const { return instance_; }
  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }

  /// k is 1-based, 1 <= k <= n-1.
  [[nodiscard]] std::span<const double> U(std::size_t k) const { return stop_[k - 1]; }
  [[nodiscard]] std::span<const double> W(std::size_t k) const { return cont_[k - 1]; }

  /// Exact product of the later CDFs at x; 1 for k >= n.
  [[nodiscard]] double u_at(std::size_t k, double x) const;
  /// Linear interpolation of the tabulated W_k; constant beyond the grid ends.
  [[nodiscard]] double w_at(std::size_t k, double x) const;

  /// Quadrature rule of X_j, j 1-based.
  [[nodiscard]] const QuantileRule& rule(std::size_t j) const { return rules_[j - 1]; }

 private:
  friend ValueCurves compute_value_curves(const ProblemInstance&, const EngineConfig&);

  ProblemInstance instance_;
  std::vector<QuantileRule> rules_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> stop_;
  std::vector<std::vector<double>> cont_;
};

/// Backward recursion W_k(m) = F_{k+1}(m) W_{k+1}(m) + int_m^inf max(U_{k+1}, W_{k+1}) dF_{k+1},
/// starting from W_{n-1} = 1 - F_n. Requires a valid atomless instance.
ValueCurves compute_value_curves(const ProblemInstance& instance, const EngineConfig& cfg = {});

struct ThresholdPolicy {
  /// x_1*..x_{n-1}*: stop at step k on a candidate X_k >= x_k*.
  std::vector<double> thresholds;
  /// Set when U_k < W_k over the whole grid and x_k* was pinned to the grid end.
  std::vector<bool> saturated;
  /// Length of the indifference interval U_k ~ W_k starting at x_k*.
  std::vector<double> ambiguity_width;

  [[nodiscard]] std::size_t n() const { return thresholds.size() + 1; }
  /// max over k of x_{k+1}* - x_k*, clamped at 0. Zero for a nonincreasing list.
  [[nodiscard]] double monotonicity_violation() const;
  [[nodiscard]] bool any_saturated() const;
};

/// x_k* = inf{x : U_k(x) >= W_k(x)}, located on the grid and refined by
/// bisection to cfg.threshold_tolerance.
ThresholdPolicy compute_thresholds(const ValueCurves& curves, const EngineConfig& cfg = {});

/// V_n = int max(U_1, W_1) dF_1; 1 when n = 1.
double optimal_value(const ValueCurves& curves);
double optimal_value(const ProblemInstance& instance, const EngineConfig& cfg = {});

struct PolicySolution {
  ValueCurves curves;
  ThresholdPolicy policy;
  double value = 1.0;
};

PolicySolution solve_policy(const ProblemInstance& instance, const EngineConfig& cfg = {});

struct PolicyOutcome {
  std::size_t stop_index = 0;  ///< 1-based
  double stopped_value = 0.0;
  bool won = false;  ///< stopped value ties or beats every observation
};

/// Stops at the first k < n with X_k >= max(X_1..X_{k-1}, x_k*), else at n.
PolicyOutcome run_policy(const ThresholdPolicy& policy, std::span<const double> path);

}  // namespace stoprule
