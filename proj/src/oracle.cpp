#include "stoprule/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stoprule/errors.hpp"

namespace stoprule {
namespace {

template <class Scalar>
bool sums_to_one(const Scalar& total) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::abs(total - 1.0) <= 1e-12;
  } else {
    return total == Scalar(1);
  }
}

/// Running-maximum states indexed by rank in the sorted union of atom values.
template <class Scalar>
struct Lattice {
  struct RankedAtom {
    std::size_t rank;
    Scalar prob;
  };

  std::vector<double> values;
  std::vector<std::vector<RankedAtom>> atoms;  // per variable, ascending rank
  std::vector<std::vector<Scalar>> cdf_le;     // P(X_j <= values[r])
  std::vector<std::vector<Scalar>> stop;       // stop[k][r] = prod_{j>k} P(X_j <= values[r]), k = 0..n

  explicit Lattice(const BasicDiscreteInstance<Scalar>& inst, std::size_t capacity) {
    const std::size_t n = inst.size();
    if (inst.total_support() * n > capacity) {
      throw CapacityError("oracle state space " + std::to_string(inst.total_support() * n) + " exceeds capacity " +
                          std::to_string(capacity));
    }
    for (const auto& var : inst.variables())
      for (const auto& a : var) values.push_back(a.value);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const std::size_t k_count = values.size();

    atoms.resize(n);
    cdf_le.assign(n, std::vector<Scalar>(k_count, Scalar(0)));
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& a : inst.variable(j)) {
        const auto r = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), a.value) - values.begin());
        atoms[j].push_back({r, a.prob});
        cdf_le[j][r] += a.prob;
      }
      for (std::size_t r = 1; r < k_count; ++r) cdf_le[j][r] += cdf_le[j][r - 1];
    }
    // stop[k] = product over 1-based j in (k, n]
    stop.assign(n + 1, std::vector<Scalar>(k_count, Scalar(1)));
    for (std::size_t k = n; k-- > 0;) {
      for (std::size_t r = 0; r < k_count; ++r) stop[k][r] = stop[k + 1][r] * cdf_le[k][r];
    }
  }

  [[nodiscard]] std::size_t size() const { return values.size(); }

  /// P(X_j < values[r]), j 0-based.
  [[nodiscard]] Scalar below(std::size_t j, std::size_t r) const { return r == 0 ? Scalar(0) : cdf_le[j][r - 1]; }

  /// Stop value at 1-based step k for candidate rank r.
  [[nodiscard]] const Scalar& stop_value(std::size_t k, std::size_t r) const { return stop[k][r]; }
};

}  // namespace

template <class Scalar>
BasicDiscreteInstance<Scalar>::BasicDiscreteInstance(std::vector<AtomList> variables) {
  if (variables.empty()) throw ValidationError("n must be >= 1");
  for (std::size_t j = 0; j < variables.size(); ++j) {
    auto atoms = std::move(variables[j]);
    const std::string where = "variable " + std::to_string(j) + ": ";
    if (atoms.empty()) throw ValidationError(where + "needs at least one atom");
    Scalar total(0);
    for (const auto& a : atoms) {
      if (!std::isfinite(a.value)) throw ValidationError(where + "atom values must be finite");
      if (!(a.prob > Scalar(0) && a.prob <= Scalar(1))) throw ValidationError(where + "atom probabilities must lie in (0,1]");
      total += a.prob;
    }
    if (!sums_to_one(total)) throw ValidationError(where + "atom probabilities must sum to 1");
    std::stable_sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
    AtomList merged;
    for (const auto& a : atoms) {
      if (!merged.empty() && merged.back().value == a.value) merged.back().prob += a.prob;
      else merged.push_back(a);
    }
    variables_.push_back(std::move(merged));
  }
}

template <class Scalar>
std::size_t BasicDiscreteInstance<Scalar>::total_support() const {
  std::size_t total = 0;
  for (const auto& v : variables_) total += v.size();
  return total;
}

DiscreteInstance to_discrete(const ProblemInstance& instance) {
  require_valid(instance);
  std::vector<DiscreteInstance::AtomList> vars;
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (!instance[j].has_atoms()) {
      throw ValidationError("distribution " + std::to_string(j) + ": kind " + to_string(instance[j].kind()) +
                            " is not finite-support");
    }
    DiscreteInstance::AtomList atoms;
    for (const auto& a : instance[j].atoms()) atoms.push_back({a.value, a.prob});
    vars.push_back(std::move(atoms));
  }
  return DiscreteInstance(std::move(vars));
}

ExactDiscreteInstance to_exact(const DiscreteInstance& instance) {
  std::vector<ExactDiscreteInstance::AtomList> vars;
  for (const auto& var : instance.variables()) {
    ExactDiscreteInstance::AtomList atoms;
    Rational total(0);
    for (const auto& a : var) {
      atoms.push_back({a.value, exact_rational(a.prob)});
      total += atoms.back().prob;
    }
    // Decimal inputs rarely sum to exactly 1 in binary; absorb the residue in the last atom.
    atoms.back().prob += Rational(1) - total;
    vars.push_back(std::move(atoms));
  }
  return ExactDiscreteInstance(std::move(vars));
}

bool StopSet::contains(double current_max, double atom) const {
  if (current_max > atom) return false;
  if (!std::binary_search(atoms.begin(), atoms.end(), atom)) return false;
  if (current_max == -std::numeric_limits<double>::infinity()) return prior_maxima.empty();
  return std::binary_search(prior_maxima.begin(), prior_maxima.end(), current_max);
}

template <class Scalar>
BasicOracleResult<Scalar> oracle_optimal_value(const BasicDiscreteInstance<Scalar>& instance,
                                               const OracleOptions& options) {
  const Lattice<Scalar> lat(instance, options.capacity);
  const std::size_t n = instance.size();
  const std::size_t states = lat.size();

  // cont[k][r]: optimal win probability after step k with running maximum rank r, k = 1..n.
  std::vector<std::vector<Scalar>> cont(n + 1, std::vector<Scalar>(states, Scalar(0)));
  for (std::size_t k = n - 1; k >= 1; --k) {
    const auto& next_atoms = lat.atoms[k];  // X_{k+1}
    const auto& next_cont = cont[k + 1];
    auto& out = cont[k];
    if (options.prune_non_candidates) {
      // Candidates (rank >= r) choose max(stop, continue); smaller values force a continue.
      Scalar suffix(0);
      std::size_t a = next_atoms.size();
      for (std::size_t r = states; r-- > 0;) {
        while (a > 0 && next_atoms[a - 1].rank >= r) {
          --a;
          const auto rho = next_atoms[a].rank;
          suffix += next_atoms[a].prob * std::max(lat.stop_value(k + 1, rho), next_cont[rho]);
        }
        out[r] = lat.below(k, r) * next_cont[r] + suffix;
      }
    } else {
      for (std::size_t r = 0; r < states; ++r) {
        Scalar acc(0);
        for (const auto& atom : next_atoms) {
          const Scalar stop_now = atom.rank >= r ? lat.stop_value(k + 1, atom.rank) : Scalar(0);
          acc += atom.prob * std::max(stop_now, next_cont[std::max(r, atom.rank)]);
        }
        out[r] = acc;
      }
    }
  }

  BasicOracleResult<Scalar> result;
  result.exact = !std::is_same_v<Scalar, double>;
  for (const auto& atom : lat.atoms[0]) {
    result.value += atom.prob * std::max(lat.stop_value(1, atom.rank), cont[1][atom.rank]);
  }

  // Stop regions, with the attainable prior maxima tracked forward.
  std::vector<bool> reachable(states, false);
  result.stop_sets.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    StopSet& set = result.stop_sets[k - 1];
    if (k > 1) {
      for (std::size_t r = 0; r < states; ++r)
        if (reachable[r]) set.prior_maxima.push_back(lat.values[r]);
    }
    for (const auto& atom : lat.atoms[k - 1]) {
      if (lat.stop_value(k, atom.rank) >= cont[k][atom.rank]) set.atoms.push_back(lat.values[atom.rank]);
    }
    std::vector<bool> next(states, false);
    bool any_prior_at_or_below = k == 1;
    std::size_t a = 0;
    const auto& here = lat.atoms[k - 1];
    for (std::size_t r = 0; r < states; ++r) {
      if (reachable[r]) any_prior_at_or_below = true;
      bool has_atom_here = false;
      bool has_atom_at_or_below = false;
      while (a < here.size() && here[a].rank <= r) {
        if (here[a].rank == r) has_atom_here = true;
        ++a;
      }
      has_atom_at_or_below = a > 0;
      next[r] = (has_atom_here && any_prior_at_or_below) || (reachable[r] && has_atom_at_or_below);
    }
    reachable = std::move(next);
  }
  return result;
}

template <class Scalar>
Scalar oracle_policy_value(const BasicDiscreteInstance<Scalar>& instance, const ThresholdPolicy& policy,
                           const OracleOptions& options) {
  const std::size_t n = instance.size();
  if (policy.n() != n) {
    throw DomainError("policy has " + std::to_string(policy.thresholds.size()) + " thresholds; instance needs " +
                      std::to_string(n - 1));
  }
  const Lattice<Scalar> lat(instance, options.capacity);
  const std::size_t states = lat.size();
  auto threshold = [&](std::size_t step) {
    return step < n ? policy.thresholds[step - 1] : -std::numeric_limits<double>::infinity();
  };

  // rest[r]: win probability after step k, not yet stopped, running maximum rank r.
  std::vector<Scalar> rest(states, Scalar(0));  // k = n: forced stop already happened
  std::vector<Scalar> out(states);
  for (std::size_t k = n - 1; k >= 1; --k) {
    const auto& next_atoms = lat.atoms[k];
    const double t = threshold(k + 1);
    Scalar suffix(0);
    std::size_t a = next_atoms.size();
    for (std::size_t r = states; r-- > 0;) {
      while (a > 0 && next_atoms[a - 1].rank >= r) {
        --a;
        const auto rho = next_atoms[a].rank;
        const bool stops = lat.values[rho] >= t;
        suffix += next_atoms[a].prob * (stops ? lat.stop_value(k + 1, rho) : rest[rho]);
      }
      out[r] = lat.below(k, r) * rest[r] + suffix;
    }
    std::swap(rest, out);
  }
  if (n == 1) rest.assign(states, Scalar(0));

  Scalar value(0);
  const double t1 = threshold(1);
  for (const auto& atom : lat.atoms[0]) {
    const bool stops = lat.values[atom.rank] >= t1;
    value += atom.prob * (stops ? lat.stop_value(1, atom.rank) : rest[atom.rank]);
  }
  return value;
}

template <class Scalar>
CandidateEvents<Scalar> candidate_events(const BasicDiscreteInstance<Scalar>& instance, std::size_t max_paths) {
  const std::size_t n = instance.size();
  std::size_t paths = 1;
  for (const auto& var : instance.variables()) {
    if (paths > max_paths / var.size()) throw CapacityError("too many paths to enumerate candidate events");
    paths *= var.size();
  }
  CandidateEvents<Scalar> ev;
  ev.marginal.assign(n, Scalar(0));
  ev.joint.assign(n, std::vector<Scalar>(n, Scalar(0)));

  std::vector<std::size_t> idx(n, 0);
  std::vector<bool> cand(n);
  for (std::size_t p = 0; p < paths; ++p) {
    Scalar prob(1);
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& atom = instance.variable(j)[idx[j]];
      prob *= atom.prob;
      cand[j] = atom.value >= running;
      running = std::max(running, atom.value);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!cand[i]) continue;
      ev.marginal[i] += prob;
      for (std::size_t j = 0; j < n; ++j)
        if (cand[j]) ev.joint[i][j] += prob;
    }
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < instance.variable(j).size()) break;
      idx[j] = 0;
    }
  }
  return ev;
}

template class BasicDiscreteInstance<double>;
template class BasicDiscreteInstance<Rational>;
template BasicOracleResult<double> oracle_optimal_value(const BasicDiscreteInstance<double>&, const OracleOptions&);
template BasicOracleResult<Rational> oracle_optimal_value(const BasicDiscreteInstance<Rational>&, const OracleOptions&);
template double oracle_policy_value(const BasicDiscreteInstance<double>&, const ThresholdPolicy&, const OracleOptions&);
template Rational oracle_policy_value(const BasicDiscreteInstance<Rational>&, const ThresholdPolicy&,
                                      const OracleOptions&);
template CandidateEvents<double> candidate_events(const BasicDiscreteInstance<double>&, std::size_t);
template CandidateEvents<Rational> candidate_events(const BasicDiscreteInstance<Rational>&, std::size_t);

}  // namespace stoprule
