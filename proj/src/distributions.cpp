#include "stoprule/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stoprule/errors.hpp"

namespace stoprule {
namespace {

constexpr double kProbTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

std::vector<std::string> find_violations(const Distribution::Law& law) {
  std::vector<std::string> out;
  std::visit(
      overloaded{
          [&](const UniformLaw& u) {
            if (!finite(u.low) || !finite(u.high)) out.emplace_back("uniform bounds must be finite");
            else if (!(u.low < u.high)) out.emplace_back("uniform requires low < high");
          },
          [&](const TwoPointLaw& t) {
            if (!finite(t.low_value) || !finite(t.high_value))
              out.emplace_back("two_point values must be finite");
            else if (!(t.low_value < t.high_value))
              out.emplace_back("two_point requires low_value < high_value");
            if (!(t.p_high >= 0.0 && t.p_high <= 1.0))
              out.emplace_back("two_point requires 0 <= p_high <= 1");
          },
          [&](const PiecewiseLinearLaw& p) {
            const auto& k = p.knots;
            if (k.size() < 2) {
              out.emplace_back("piecewise_linear_cdf needs at least two knots");
              return;
            }
            for (const auto& knot : k) {
              if (!finite(knot.x) || !finite(knot.cdf)) {
                out.emplace_back("piecewise_linear_cdf knots must be finite");
                return;
              }
            }
            for (std::size_t i = 1; i < k.size(); ++i) {
              if (!(k[i].x > k[i - 1].x)) {
                out.emplace_back("piecewise_linear_cdf x-knots must be strictly increasing");
                break;
              }
            }
            for (std::size_t i = 1; i < k.size(); ++i) {
              if (k[i].cdf < k[i - 1].cdf) {
                out.emplace_back("piecewise_linear_cdf F-knots violate monotonicity");
                break;
              }
            }
            if (std::abs(k.front().cdf) > kProbTolerance || std::abs(k.back().cdf - 1.0) > kProbTolerance)
              out.emplace_back("piecewise_linear_cdf F-knots must span [0,1]");
          },
          [&](const ExtremalComponentLaw& e) {
            if (e.n < 1) out.emplace_back("extremal_component requires n >= 1");
            else if (e.index < 1 || e.index > e.n)
              out.emplace_back("extremal_component requires 1 <= index <= n");
          },
          [&](const PointMassLaw& m) {
            if (!finite(m.value)) out.emplace_back("point_mass value must be finite");
          },
          [&](const DiscreteLaw& d) {
            if (d.atoms.empty()) {
              out.emplace_back("discrete law needs at least one atom");
              return;
            }
            double total = 0.0;
            for (const auto& a : d.atoms) {
              if (!finite(a.value)) out.emplace_back("discrete atom values must be finite");
              if (!(a.prob > 0.0 && a.prob <= 1.0)) out.emplace_back("discrete atom probabilities must lie in (0,1]");
              total += a.prob;
            }
            if (std::abs(total - 1.0) > kProbTolerance) out.emplace_back("discrete atom probabilities must sum to 1");
            for (std::size_t i = 1; i < d.atoms.size(); ++i) {
              if (!(d.atoms[i].value > d.atoms[i - 1].value)) {
                out.emplace_back("discrete atom values must be distinct");
                break;
              }
            }
          },
      },
      law);
  return out;
}

Distribution::Law normalized(Distribution::Law law) {
  if (auto* d = std::get_if<DiscreteLaw>(&law)) {
    std::stable_sort(d->atoms.begin(), d->atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.value < b.value; });
  }
  if (auto* p = std::get_if<PiecewiseLinearLaw>(&law)) {
    // Snap end knots that are within tolerance of 0 and 1.
    if (p->knots.size() >= 2) {
      if (std::abs(p->knots.front().cdf) <= kProbTolerance) p->knots.front().cdf = 0.0;
      if (std::abs(p->knots.back().cdf - 1.0) <= kProbTolerance) p->knots.back().cdf = 1.0;
    }
  }
  return law;
}

double extremal_low_mass(const ExtremalComponentLaw& e) {
  return static_cast<double>(e.n - 1) / static_cast<double>(e.n);
}

}  // namespace

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::two_point: return "two_point";
    case DistributionKind::piecewise_linear_cdf: return "piecewise_linear_cdf";
    case DistributionKind::extremal_component: return "extremal_component";
    case DistributionKind::point_mass: return "point_mass";
    case DistributionKind::discrete: return "discrete";
  }
  return "unknown";
}

Distribution::Distribution(Law law) : law_(normalized(std::move(law))), violations_(find_violations(law_)) {}

Distribution Distribution::uniform(double low, double high) { return Distribution(UniformLaw{low, high}); }

Distribution Distribution::two_point(double low_value, double high_value, double p_high) {
  return Distribution(TwoPointLaw{low_value, high_value, p_high});
}

Distribution Distribution::piecewise_linear(std::vector<Knot> knots) {
  return Distribution(PiecewiseLinearLaw{std::move(knots)});
}

Distribution Distribution::extremal_component(int n, int index) {
  return Distribution(ExtremalComponentLaw{n, index});
}

Distribution Distribution::point_mass(double value) { return Distribution(PointMassLaw{value}); }

Distribution Distribution::discrete(std::vector<Atom> atoms) { return Distribution(DiscreteLaw{std::move(atoms)}); }

DistributionKind Distribution::kind() const { return static_cast<DistributionKind>(law_.index()); }

void Distribution::check() const {
  if (valid()) return;
  std::ostringstream msg;
  msg << "invalid " << to_string(kind()) << " distribution:";
  for (const auto& v : violations_) msg << ' ' << v << ';';
  throw ValidationError(msg.str());
}

bool Distribution::has_atoms() const {
  switch (kind()) {
    case DistributionKind::two_point:
    case DistributionKind::point_mass:
    case DistributionKind::discrete:
      return true;
    default:
      return false;
  }
}

double Distribution::cdf(double x) const {
  check();
  if (std::isnan(x)) throw DomainError("cdf argument must not be NaN");
  if (x == -INFINITY) return 0.0;
  if (x == INFINITY) return 1.0;
  return std::visit(
      overloaded{
          [&](const UniformLaw& u) { return std::clamp((x - u.low) / (u.high - u.low), 0.0, 1.0); },
          [&](const TwoPointLaw& t) {
            if (x < t.low_value) return 0.0;
            if (x < t.high_value) return 1.0 - t.p_high;
            return 1.0;
          },
          [&](const PiecewiseLinearLaw& p) {
            const auto& k = p.knots;
            if (x <= k.front().x) return 0.0;
            if (x >= k.back().x) return 1.0;
            auto it = std::upper_bound(k.begin(), k.end(), x, [](double v, const Knot& kn) { return v < kn.x; });
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            const double w = (x - left.x) / (right.x - left.x);
            return left.cdf + w * (right.cdf - left.cdf);
          },
          [&](const ExtremalComponentLaw& e) {
            if (e.index == 1) return std::clamp(x, 0.0, 1.0);
            const double i = e.index;
            const double low_mass = extremal_low_mass(e);
            if (x <= -i) return 0.0;
            if (x < -i + 1) return low_mass * (x + i);
            if (x <= i) return low_mass;
            if (x < i + 1) return low_mass + (x - i) / e.n;
            return 1.0;
          },
          [&](const PointMassLaw& m) { return x < m.value ? 0.0 : 1.0; },
          [&](const DiscreteLaw& d) {
            double acc = 0.0;
            for (const auto& a : d.atoms) {
              if (a.value > x) break;
              acc += a.prob;
            }
            return std::min(acc, 1.0);
          },
      },
      law_);
}

double Distribution::quantile(double u) const {
  check();
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  return std::visit(
      overloaded{
          [&](const UniformLaw& l) { return l.low + u * (l.high - l.low); },
          [&](const TwoPointLaw& t) { return u <= 1.0 - t.p_high ? t.low_value : t.high_value; },
          [&](const PiecewiseLinearLaw& p) {
            const auto& k = p.knots;
            auto it = std::lower_bound(k.begin(), k.end(), u, [](const Knot& kn, double v) { return kn.cdf < v; });
            if (it == k.begin()) return k.front().x;
            if (it == k.end()) return k.back().x;
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            const double w = (u - left.cdf) / (right.cdf - left.cdf);
            return left.x + w * (right.x - left.x);
          },
          [&](const ExtremalComponentLaw& e) {
            if (e.index == 1) return u;
            const double i = e.index;
            const double low_mass = extremal_low_mass(e);
            if (u <= low_mass) return -i + u / low_mass;
            return i + (u - low_mass) * e.n;
          },
          [&](const PointMassLaw& m) { return m.value; },
          [&](const DiscreteLaw& d) {
            double acc = 0.0;
            for (const auto& a : d.atoms) {
              acc += a.prob;
              if (acc >= u) return a.value;
            }
            return d.atoms.back().value;
          },
      },
      law_);
}

Support Distribution::support() const {
  check();
  return std::visit(
      overloaded{
          [](const UniformLaw& u) { return Support{u.low, u.high}; },
          [](const TwoPointLaw& t) {
            if (t.p_high == 0.0) return Support{t.low_value, t.low_value};
            if (t.p_high == 1.0) return Support{t.high_value, t.high_value};
            return Support{t.low_value, t.high_value};
          },
          [](const PiecewiseLinearLaw& p) {
            // Trim flat zero-mass ends.
            const auto& k = p.knots;
            std::size_t first = 0;
            while (first + 1 < k.size() && k[first + 1].cdf == 0.0) ++first;
            std::size_t last = k.size() - 1;
            while (last > 0 && k[last - 1].cdf == 1.0) --last;
            return Support{k[first].x, k[last].x};
          },
          [](const ExtremalComponentLaw& e) {
            if (e.index == 1) return Support{0.0, 1.0};
            const double i = e.index;
            return Support{-i, i + 1};
          },
          [](const PointMassLaw& m) { return Support{m.value, m.value}; },
          [](const DiscreteLaw& d) { return Support{d.atoms.front().value, d.atoms.back().value}; },
      },
      law_);
}

std::vector<double> Distribution::breakpoints() const {
  check();
  return std::visit(
      overloaded{
          [](const UniformLaw& u) { return std::vector<double>{u.low, u.high}; },
          [](const TwoPointLaw& t) { return std::vector<double>{t.low_value, t.high_value}; },
          [](const PiecewiseLinearLaw& p) {
            std::vector<double> xs;
            xs.reserve(p.knots.size());
            for (const auto& k : p.knots) xs.push_back(k.x);
            return xs;
          },
          [](const ExtremalComponentLaw& e) {
            if (e.index == 1) return std::vector<double>{0.0, 1.0};
            const double i = e.index;
            return std::vector<double>{-i, -i + 1, i, i + 1};
          },
          [](const PointMassLaw& m) { return std::vector<double>{m.value}; },
          [](const DiscreteLaw& d) {
            std::vector<double> xs;
            for (const auto& a : d.atoms) xs.push_back(a.value);
            return xs;
          },
      },
      law_);
}

std::vector<Atom> Distribution::atoms() const {
  check();
  std::vector<Atom> out;
  std::visit(overloaded{
                 [&](const TwoPointLaw& t) {
                   if (t.p_high < 1.0) out.push_back({t.low_value, 1.0 - t.p_high});
                   if (t.p_high > 0.0) out.push_back({t.high_value, t.p_high});
                 },
                 [&](const PointMassLaw& m) { out.push_back({m.value, 1.0}); },
                 [&](const DiscreteLaw& d) { out = d.atoms; },
                 [&](const auto&) {
                   throw ValidationError("distribution of kind " + to_string(kind()) + " has no finite atom list");
                 },
             },
             law_);
  return out;
}

double evaluate_cdf(const Distribution& d, double x) {
  if (!std::isfinite(x)) throw DomainError("cdf argument must be finite");
  return d.cdf(x);
}

double quantile(const Distribution& d, double u) { return d.quantile(u); }

double sample(const Distribution& d, RandomStream& stream) {
  if (d.kind() == DistributionKind::point_mass) {
    d.check();
    stream.next_uniform();  // keep the counter aligned with other kinds
    return std::get<PointMassLaw>(d.law()).value;
  }
  return d.quantile(stream.next_uniform());
}

bool ProblemInstance::all_continuous() const {
  return std::none_of(distributions_.begin(), distributions_.end(),
                      [](const Distribution& d) { return d.has_atoms(); });
}

ValidationReport validate_instance(const ProblemInstance& instance) {
  ValidationReport report;
  if (instance.empty()) {
    report.ok = false;
    report.violations.push_back({-1, "n must be >= 1"});
    return report;
  }
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (const auto& v : instance[i].violations()) {
      report.violations.push_back({static_cast<std::ptrdiff_t>(i), v});
    }
  }
  report.ok = report.violations.empty();
  report.all_continuous = instance.all_continuous();
  return report;
}

void require_valid(const ProblemInstance& instance) {
  const auto report = validate_instance(instance);
  if (report.ok) return;
  std::ostringstream msg;
  msg << "invalid instance:";
  for (const auto& v : report.violations) {
    if (v.index >= 0) msg << " [" << v.index << "]";
    msg << ' ' << v.message << ';';
  }
  throw ValidationError(msg.str());
}

ProblemInstance make_extremal_instance(int n) {
  if (n < 1) throw DomainError("extremal instance requires n >= 1");
  std::vector<Distribution> ds;
  ds.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) ds.push_back(Distribution::extremal_component(n, i));
  return ProblemInstance(std::move(ds));
}

}  // namespace stoprule
