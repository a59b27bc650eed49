#include "stoprule/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stoprule/errors.hpp"

namespace stoprule {
namespace {

void require_engine_instance(const ProblemInstance& instance) {
  require_valid(instance);
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (instance[j].has_atoms()) {
      throw ContinuityError("distribution " + std::to_string(j) + " (" + to_string(instance[j].kind()) +
                            ") has atoms; the value engine needs atomless laws");
    }
  }
}

double trapezoid(double du, double a, double b) { return 0.5 * du * (a + b); }

/// Interpolation weight of x in [x0, x1]; 0 for zero-width cells.
double fraction(double x, double x0, double x1) { return x1 > x0 ? (x - x0) / (x1 - x0) : 0.0; }

}  // namespace

void EngineConfig::validate() const {
  if (grid_points < 16) throw ValidationError("grid_points must be >= 16");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1e-3)) throw ValidationError("tail_epsilon must lie in (0, 1e-3)");
  if (!(threshold_tolerance > 0.0)) throw ValidationError("threshold_tolerance must be positive");
  if (!(tie_tolerance >= 0.0)) throw ValidationError("tie_tolerance must be non-negative");
  if (!(value_tolerance >= 0.0)) throw ValidationError("value_tolerance must be non-negative");
}

QuantileRule::QuantileRule(const Distribution& d, int grid_points) {
  if (d.has_atoms()) throw ContinuityError("quantile rule needs an atomless law");
  auto bps = d.breakpoints();
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<double> cdfs(bps.size());
  for (std::size_t i = 0; i < bps.size(); ++i) cdfs[i] = d.cdf(bps[i]);

  levels_.push_back(cdfs.front());
  points_.push_back(bps.front());
  for (std::size_t l = 0; l + 1 < bps.size(); ++l) {
    const double mass = cdfs[l + 1] - cdfs[l];
    if (mass > 0.0) {
      const long steps = std::max(1L, std::lround(grid_points * mass));
      for (long s = 1; s < steps; ++s) {
        const double w = static_cast<double>(s) / static_cast<double>(steps);
        levels_.push_back(cdfs[l] + w * mass);
        points_.push_back(bps[l] + w * (bps[l + 1] - bps[l]));
      }
    }
    levels_.push_back(cdfs[l + 1]);
    points_.push_back(bps[l + 1]);
  }
}

double QuantileRule::tail_integral(double from, const std::function<double(double)>& f) const {
  const auto& x = points_;
  const auto& u = levels_;
  if (from >= x.back()) return 0.0;
  std::size_t start = 0;
  double total = 0.0;
  if (from > x.front()) {
    start = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), from) - x.begin());
    // partial cell [from, x[start]]
    const double u_from = u[start - 1] + fraction(from, x[start - 1], x[start]) * (u[start] - u[start - 1]);
    total += trapezoid(u[start] - u_from, f(from), f(x[start]));
  }
  double prev = f(x[start]);
  for (std::size_t i = start + 1; i < x.size(); ++i) {
    const double cur = f(x[i]);
    total += trapezoid(u[i] - u[i - 1], prev, cur);
    prev = cur;
  }
  return total;
}

double ValueCurves::u_at(std::size_t k, double x) const {
  double out = 1.0;
  for (std::size_t j = n(); j > k; --j) out *= instance_[j - 1].cdf(x);
  return out;
}

double ValueCurves::w_at(std::size_t k, double x) const {
  const auto& w = cont_[k - 1];
  if (x <= grid_.front()) return w.front();
  if (x >= grid_.back()) return w.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), x) - grid_.begin());
  const double t = fraction(x, grid_[hi - 1], grid_[hi]);
  return w[hi - 1] + t * (w[hi] - w[hi - 1]);
}

ValueCurves compute_value_curves(const ProblemInstance& instance, const EngineConfig& cfg) {
  cfg.validate();
  require_engine_instance(instance);
  const std::size_t n = instance.size();

  ValueCurves curves;
  curves.instance_ = instance;
  curves.rules_.reserve(n);
  for (const auto& d : instance) curves.rules_.emplace_back(d, cfg.grid_points);

  auto& grid = curves.grid_;
  for (const auto& rule : curves.rules_) grid.insert(grid.end(), rule.points().begin(), rule.points().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 2) throw DegenerateSupportError("shared grid has zero width");
  if (n < 2) return curves;

  const std::size_t g_count = grid.size();
  // cdf[j][g] = F_{j+1}(grid[g])
  std::vector<std::vector<double>> cdf(n, std::vector<double>(g_count));
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t g = 0; g < g_count; ++g) cdf[j][g] = instance[j].cdf(grid[g]);
  }

  curves.stop_.assign(n - 1, std::vector<double>(g_count));
  curves.cont_.assign(n - 1, std::vector<double>(g_count));
  // U_{n-1} = F_n, U_k = F_{k+1} U_{k+1}; same multiplication order as u_at.
  curves.stop_[n - 2] = cdf[n - 1];
  for (std::size_t k = n - 2; k >= 1; --k) {
    for (std::size_t g = 0; g < g_count; ++g) curves.stop_[k - 1][g] = curves.stop_[k][g] * cdf[k][g];
  }
  for (std::size_t g = 0; g < g_count; ++g) curves.cont_[n - 2][g] = 1.0 - cdf[n - 1][g];

  std::vector<double> best(g_count);
  std::vector<double> tail_sum;
  std::vector<std::size_t> node_index;
  for (std::size_t k = n - 2; k >= 1; --k) {
    // Integrate max(U_{k+1}, W_{k+1}) against F_{k+1}.
    const auto& next_stop = curves.stop_[k];
    const auto& next_cont = curves.cont_[k];
    for (std::size_t g = 0; g < g_count; ++g) best[g] = std::max(next_stop[g], next_cont[g]);

    const QuantileRule& rule = curves.rules_[k];
    const auto& ux = rule.points();
    const auto& uu = rule.levels();
    const std::size_t m = ux.size();
    node_index.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      node_index[i] = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), ux[i]) - grid.begin());
    }
    tail_sum.assign(m, 0.0);
    for (std::size_t i = m - 1; i-- > 0;) {
      tail_sum[i] = tail_sum[i + 1] + trapezoid(uu[i + 1] - uu[i], best[node_index[i]], best[node_index[i + 1]]);
    }

    auto& cont = curves.cont_[k - 1];
    std::size_t cell = 0;  // largest i with ux[i] <= grid[g]
    for (std::size_t g = 0; g < g_count; ++g) {
      const double x = grid[g];
      double tail;
      if (x < ux.front()) {
        tail = tail_sum.front();
      } else {
        while (cell + 1 < m && ux[cell + 1] <= x) ++cell;
        if (cell + 1 == m) {
          tail = 0.0;
        } else {
          const double u_x = uu[cell] + fraction(x, ux[cell], ux[cell + 1]) * (uu[cell + 1] - uu[cell]);
          tail = trapezoid(uu[cell + 1] - u_x, best[g], best[node_index[cell + 1]]) + tail_sum[cell + 1];
        }
      }
      cont[g] = cdf[k][g] * next_cont[g] + tail;
    }
    // Monotone repair: W_k is nonincreasing and within [0, 1].
    for (std::size_t g = 0; g < g_count; ++g) {
      cont[g] = std::clamp(cont[g], 0.0, 1.0);
      if (g > 0) cont[g] = std::min(cont[g], cont[g - 1]);
    }
  }
  return curves;
}

double ThresholdPolicy::monotonicity_violation() const {
  double worst = 0.0;
  for (std::size_t k = 1; k < thresholds.size(); ++k) worst = std::max(worst, thresholds[k] - thresholds[k - 1]);
  return worst;
}

bool ThresholdPolicy::any_saturated() const {
  return std::any_of(saturated.begin(), saturated.end(), [](bool s) { return s; });
}

ThresholdPolicy compute_thresholds(const ValueCurves& curves, const EngineConfig& cfg) {
  cfg.validate();
  ThresholdPolicy policy;
  const std::size_t n = curves.n();
  if (n < 2) return policy;
  const auto& grid = curves.grid();
  const double zeta = cfg.tie_tolerance;

  for (std::size_t k = 1; k < n; ++k) {
    const auto u = curves.U(k);
    const auto w = curves.W(k);
    std::size_t g = 0;
    while (g < grid.size() && u[g] - w[g] < -zeta) ++g;

    double x_star;
    bool saturated = false;
    if (g == grid.size()) {
      x_star = grid.back();
      saturated = true;
    } else if (g == 0 || u[g] - w[g] < 0.0) {
      x_star = grid[g];
    } else {
      double lo = grid[g - 1];
      double hi = grid[g];
      while (hi - lo > cfg.threshold_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (curves.u_at(k, mid) - curves.w_at(k, mid) >= 0.0) hi = mid;
        else lo = mid;
      }
      x_star = 0.5 * (lo + hi);
    }

    double width = 0.0;
    if (!saturated) {
      std::size_t h = g;
      while (h + 1 < grid.size() && std::abs(u[h + 1] - w[h + 1]) <= zeta) ++h;
      if (std::abs(u[g] - w[g]) <= zeta) width = grid[h] - x_star;
    }
    policy.thresholds.push_back(x_star);
    policy.saturated.push_back(saturated);
    policy.ambiguity_width.push_back(std::max(0.0, width));
  }
  return policy;
}

double optimal_value(const ValueCurves& curves) {
  if (curves.n() < 2) return 1.0;
  const auto& grid = curves.grid();
  const auto u = curves.U(1);
  const auto w = curves.W(1);
  const QuantileRule& rule = curves.rule(1);
  const auto& ux = rule.points();
  const auto& uu = rule.levels();
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) {
    const auto g = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), ux[i]) - grid.begin());
    const double cur = std::max(u[g], w[g]);
    if (i > 0) total += trapezoid(uu[i] - uu[i - 1], prev, cur);
    prev = cur;
  }
  return std::clamp(total, 0.0, 1.0);
}

double optimal_value(const ProblemInstance& instance, const EngineConfig& cfg) {
  return optimal_value(compute_value_curves(instance, cfg));
}

PolicySolution solve_policy(const ProblemInstance& instance, const EngineConfig& cfg) {
  auto curves = compute_value_curves(instance, cfg);
  auto policy = compute_thresholds(curves, cfg);
  const double value = optimal_value(curves);
  return PolicySolution{std::move(curves), std::move(policy), value};
}

PolicyOutcome run_policy(const ThresholdPolicy& policy, std::span<const double> path) {
  if (path.size() != policy.n()) {
    throw DomainError("path has " + std::to_string(path.size()) + " observations but the policy expects " +
                      std::to_string(policy.n()));
  }
  const std::size_t n = path.size();
  double running_max = -INFINITY;
  std::size_t stop = n;
  for (std::size_t k = 1; k < n; ++k) {
    const double x = path[k - 1];
    if (x >= running_max && x >= policy.thresholds[k - 1]) {
      stop = k;
      break;
    }
    running_max = std::max(running_max, x);
  }
  const double stopped = path[stop - 1];
  const double overall = *std::max_element(path.begin(), path.end());
  return PolicyOutcome{stop, stopped, stopped >= overall};
}

}  // namespace stoprule
