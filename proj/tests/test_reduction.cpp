#include <doctest.h>

#include <cmath>
#include <random>

#include "reference.hpp"
#include "stoprule/errors.hpp"
#include "stoprule/generators.hpp"
#include "stoprule/odds.hpp"
#include "stoprule/reduction.hpp"

using namespace stoprule;

namespace {

Rational frac(long long a, long long b) { return Rational(a, b); }

ProblemInstance iid_uniform(int n) {
  return ProblemInstance(std::vector<Distribution>(static_cast<std::size_t>(n), Distribution::uniform(0, 1)));
}

template <class T>
BasicVSequence<T> spaced(std::vector<T> p) {
  BasicVSequence<T> v;
  v.a = {0.0};
  for (std::size_t i = 1; i <= p.size(); ++i) {
    v.a.push_back(static_cast<double>(i));
    v.b.push_back(-static_cast<double>(i));
  }
  v.p_high = std::move(p);
  return v;
}

/// int_{x1}^inf U_i dF_i by a fine midpoint rule in quantile space.
double balance_rhs(const ProblemInstance& inst, std::size_t i, double x1) {
  const auto& d = inst[i - 1];
  const double lo = d.cdf(x1);
  const int steps = 40'000;
  double acc = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double x = d.quantile(lo + (1.0 - lo) * (s + 0.5) / steps);
    double u = 1.0;
    for (std::size_t j = i; j < inst.size(); ++j) u *= inst[j].cdf(x);
    acc += u;
  }
  return acc * (1.0 - lo) / steps;
}

}  // namespace

TEST_CASE("v_sequence_value examples") {
  const auto thirds = spaced<Rational>({frac(1, 3), frac(1, 3)});
  const auto br = v_sequence_branches(thirds);
  CHECK(br.stop == frac(4, 9));
  CHECK(br.cont == frac(4, 9));
  CHECK(v_sequence_value(thirds) == frac(4, 9));

  const auto low = v_sequence_branches(spaced<double>({0.1, 0.1}));
  CHECK(low.stop == doctest::Approx(0.81));
  CHECK(low.cont == doctest::Approx(0.81 * 2.0 / 9.0));
  CHECK(v_sequence_value(spaced<double>({0.1, 0.1})) == doctest::Approx(0.81));

  CHECK(v_sequence_value(spaced<Rational>({0, 0, 0})) == 1);
}

TEST_CASE("V-sequences are validated") {
  auto v = spaced<double>({0.5, 0.5});
  v.a[2] = v.a[1];
  CHECK_THROWS_AS(v.validate(), ValidationError);
  v = spaced<double>({0.5, 0.5});
  v.b[0] = 0.5;
  CHECK_THROWS_AS(v.validate(), ValidationError);
  v = spaced<double>({0.5, 1.5});
  CHECK_THROWS_AS(v.validate(), ValidationError);
  v = spaced<double>({0.5});
  v.b.push_back(-3);
  CHECK_THROWS_AS(v.validate(), ValidationError);
}

TEST_CASE("c constants") {
  SUBCASE("i.i.d. uniform n = 3") {
    const double x1 = reference::iid_uniform::x1_star_n3();
    const auto c = compute_c_constants(iid_uniform(3), x1);
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0] - (1 - x1 * x1) / (2 * (1 - x1))) <= 1e-6);
  }
  SUBCASE("observation entirely below x1*") {
    const ProblemInstance inst({Distribution::uniform(0, 1), Distribution::uniform(-2, -1), Distribution::uniform(0, 1)});
    const double x1 = 0.5;
    const auto c = compute_c_constants(inst, x1);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == x1 + 1.0);
  }
  SUBCASE("extremal n = 4 satisfies the balance equation") {
    const auto inst = make_extremal_instance(4);
    const auto report = build_v_sequence(inst);
    REQUIRE(report.c.size() == 2);
    for (std::size_t i = 2; i <= 3; ++i) {
      const double ci = report.c[i - 2];
      CHECK(ci > report.x1_star);
      double u = 1.0;
      for (std::size_t j = i; j < inst.size(); ++j) u *= inst[j].cdf(ci);
      const double mass = 1.0 - inst[i - 1].cdf(report.x1_star);
      CHECK(std::abs(u * mass - balance_rhs(inst, i, report.x1_star)) <= 1e-6);
    }
  }
  SUBCASE("random instances satisfy the balance equation") {
    gen::Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
      const auto inst = gen::random_continuous_instance(rng, 6, 3);
      const auto report = build_v_sequence(inst);
      for (std::size_t i = 2; i < inst.size(); ++i) {
        const double ci = report.c[i - 2];
        const double mass = 1.0 - inst[i - 1].cdf(report.x1_star);
        CHECK(ci > report.x1_star);
        if (mass <= EngineConfig{}.tail_epsilon) continue;
        double u = 1.0;
        for (std::size_t j = i; j < inst.size(); ++j) u *= inst[j].cdf(ci);
        if (u >= 1.0 - 1e-12 && ci == report.x1_star + 1.0) continue;  // U_i is 1 above x1*
        CHECK(std::abs(u * mass - balance_rhs(inst, i, report.x1_star)) <= 1e-4);
      }
    }
  }
}

TEST_CASE("build_v_sequence examples") {
  for (int n : {2, 3, 4, 6}) {
    const auto r = build_v_sequence(make_extremal_instance(n));
    for (double p : r.v_sequence.p_high) CHECK(p == doctest::Approx(1.0 / n).epsilon(1e-9));
  }

  const auto iid3 = build_v_sequence(iid_uniform(3));
  const double p3 = 1.0 - reference::iid_uniform::x1_star_n3();
  for (double p : iid3.v_sequence.p_high) CHECK(std::abs(p - p3) <= 1e-5);

  const auto iid2 = build_v_sequence(iid_uniform(2));
  const double p2 = iid2.v_sequence.p_high[0];
  CHECK(iid2.value_reduced == doctest::Approx(std::max(1.0 - p2, p2)));
  CHECK(iid2.c.empty());

  CHECK_THROWS_AS(build_v_sequence(iid_uniform(1)), DomainError);
  CHECK_THROWS_AS(build_v_sequence(ProblemInstance({Distribution::uniform(0, 1), Distribution::point_mass(0)})),
                  ContinuityError);
}

TEST_CASE("verify_reduction examples") {
  const auto iid3 = verify_reduction(iid_uniform(3));
  CHECK(std::abs(iid3.value_original - 0.68428) <= 1e-4);
  CHECK(std::abs(iid3.value_reduced - 0.47596) <= 1e-4);
  const auto br = v_sequence_branches(iid3.v_sequence);
  CHECK(std::abs(br.cont - 0.42788) <= 1e-4);
  CHECK(iid3.inequality_holds);
  CHECK(iid3.oracle_agrees);

  const auto ext5 = verify_reduction(make_extremal_instance(5));
  CHECK(std::abs(ext5.value_original - 0.4096) <= 1e-4);
  CHECK(std::abs(ext5.value_reduced - 0.4096) <= 1e-4);
  CHECK(ext5.inequality_holds);

  const auto iid2 = verify_reduction(iid_uniform(2));
  CHECK(std::abs(iid2.value_original - 0.75) <= 1e-6);
  CHECK(std::abs(iid2.value_reduced - 0.5) <= 1e-6);
}

TEST_CASE("reduction inequality and construction invariants on random instances") {
  gen::Rng rng(6006);
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = gen::random_continuous_instance(rng, 6);
    const auto r = verify_reduction(inst);
    const auto& v = r.v_sequence;
    CAPTURE(rep);
    CHECK(r.inequality_holds);
    CHECK(r.oracle_agrees);
    CHECK(std::abs(*r.oracle_value - r.value_reduced) <= 1e-12);
    CHECK_NOTHROW(v.validate());
    for (std::size_t j = 2; j + 1 <= inst.size(); ++j) CHECK(v.a[j - 1] <= r.c[j - 2]);
    for (double c : r.c) CHECK(c > r.x1_star);
  }
}

TEST_CASE("V-sequence value never falls below b_n") {
  gen::Rng rng(1001);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> ps(1 + rep % 11);
    for (auto& x : ps) x = p(rng);
    const auto v = spaced(ps);
    CHECK(v_sequence_value(v) >= bound_b(static_cast<long long>(v.n())) - 1e-12);
  }
}

TEST_CASE("V-sequence formula equals the exact oracle") {
  gen::Rng rng(2002);
  for (int rep = 0; rep < 500; ++rep) {
    const auto v = gen::random_exact_v_sequence(rng, 6);
    CHECK(v_sequence_value(v) == oracle_optimal_value(to_discrete_instance(v)).value);
    const auto fl = spaced<double>([&] {
      std::vector<double> out;
      for (const auto& p : v.p_high) out.push_back(to_double(p));
      return out;
    }());
    CHECK(std::abs(v_sequence_value(fl) - to_double(v_sequence_value(v))) <= 1e-12);
  }
}

TEST_CASE("both branches agree when every p_i = 1/n") {
  for (long long n = 2; n <= 12; ++n) {
    const auto exact = v_sequence_branches(spaced<Rational>(std::vector<Rational>(n - 1, frac(1, n))));
    CHECK(exact.stop == exact.cont);
    CHECK(exact.stop == bound_b_exact(n));
    const auto fl = v_sequence_branches(spaced<double>(std::vector<double>(n - 1, 1.0 / n)));
    CHECK(std::abs(fl.stop - fl.cont) <= 1e-12);
  }
}
