#include "crsm/tdf.hpp"

#include <cmath>

#include "crsm/errors.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace crsm;
using namespace crsm::testing;

namespace {

TailDependenceFunctional spectral_g() {
  return TailDependenceFunctional::spectral(ab(), {SpectralAtom{1.0, pf({1.0, 0.5})}});
}

Functional l2_norm() {
  return [](const PointFunction& u) {
    double s = 0.0;
    for (double v : u.values()) s += v * v;
    return std::sqrt(s);
  };
}

Functional sqrt_sum_squared() {
  return [](const PointFunction& u) {
    double s = 0.0;
    for (double v : u.values()) s += std::sqrt(v);
    return s * s;
  };
}

}  // namespace

TEST_CASE("evaluation of the three representations") {
  const auto ch = TailDependenceFunctional::choquet(theta2());
  CHECK(eval(ch, pf({2.0, 1.0})) == doctest::Approx(2.5));
  CHECK(ch.kind() == TailDependenceFunctional::Kind::choquet);

  CHECK(eval(spectral_g(), pf({1.0, 2.0})) == doctest::Approx(1.0));
  CHECK(eval(spectral_g(), pf({2.0, 1.0})) == doctest::Approx(2.0));

  const auto leb = TailDependenceFunctional::lebesgue(ab(), DiscreteMeasure({1.0, 2.0}));
  CHECK(eval(leb, pf({2.0, 1.0})) == doctest::Approx(4.0));
  CHECK(to_string(leb.kind()) == "lebesgue");

  CHECK_THROWS_AS(eval(ch, pf({1.0})), CarrierMismatch);
  CHECK_THROWS_AS(TailDependenceFunctional::spectral(ab(), {SpectralAtom{0.5, pf({1.0, 0.5})}}), InvalidArgument);
}

TEST_CASE("extremal coefficients and envelope") {
  const auto th = extremal_coefficients(spectral_g());
  CHECK(th(mask({0})) == doctest::Approx(1.0));
  CHECK(th(mask({1})) == doctest::Approx(0.5));
  CHECK(th(mask({0, 1})) == doctest::Approx(1.0));

  const auto env = crsm_envelope(spectral_g());
  CHECK(eval(env, pf({1.0, 2.0})) == doctest::Approx(1.5));
  CHECK(eval(env, pf({2.0, 1.0})) == doctest::Approx(2.0));

  // Domination holds, the converse fails with gap -1/2.
  CHECK(dominates(env, spectral_g(), 2000, 3).dominates);
  const auto rev = dominates(spectral_g(), env, 2000, 3);
  CHECK_FALSE(rev.dominates);
  CHECK(rev.min_difference <= -1e-3);
  CHECK(eval(spectral_g(), pf({1.0, 2.0})) - eval(env, pf({1.0, 2.0})) == doctest::Approx(-0.5));
}

TEST_CASE("property: envelope is idempotent and dominates; evaluation is monotone and homogeneous") {
  PhiloxStream rng(31, 0);
  for (int t = 0; t < 60; ++t) {
    const auto d = 1 + rng.below(4);
    const auto carrier = Carrier::numbered(d);
    std::vector<SpectralAtom> atoms;
    const auto n = 1 + rng.below(4);
    for (std::uint64_t i = 0; i < n; ++i) atoms.push_back({1.0 / double(n), random_test_function(d, rng)});
    const auto ell = TailDependenceFunctional::spectral(carrier, atoms);
    const auto env = crsm_envelope(ell);
    const auto env2 = crsm_envelope(env);
    const auto t1 = extremal_coefficients(env), t2 = extremal_coefficients(env2);
    for (std::size_t m = 0; m < t1.table().size(); ++m) CHECK(t1.table()[m] == doctest::Approx(t2.table()[m]));
    CHECK(classify(t1).completely_alternating);

    const auto f = random_test_function(d, rng);
    CHECK(eval(env, f) >= eval(ell, f) - 1e-9);
    const auto g = f.max_with(random_test_function(d, rng));
    CHECK(eval(ell, g) >= eval(ell, f) - 1e-12);
    CHECK(eval(ell, f.scaled(3.0)) == doctest::Approx(3.0 * eval(ell, f)));
  }
}

TEST_CASE("max-complete alternation: valid functionals and the negative control") {
  for (int order = 1; order <= 5; ++order) {
    CHECK_FALSE(check_max_complete_alternation(l2_norm(), 3, order, 1000, 41).violation);
    CHECK_FALSE(check_max_complete_alternation(TailDependenceFunctional::choquet(theta2()).as_functional(), 2,
                                               order, 1000, 42)
                    .violation);
    CHECK_FALSE(check_max_complete_alternation(spectral_g().as_functional(), 2, order, 1000, 43).violation);
  }
  const auto bad = check_max_complete_alternation(sqrt_sum_squared(), 2, 2, 1000, 44);
  CHECK(bad.violation);
  CHECK(bad.max_value > 1e-3);
  CHECK(bad.witness.size() == 3);
  CHECK_THROWS_AS(check_max_complete_alternation(l2_norm(), 2, 6, 10, 1), InvalidArgument);
}

TEST_CASE("dual linear program") {
  const auto g = dual_greedy(theta2(), pf({2.0, 1.0}));
  CHECK(g.value == doctest::Approx(2.5));
  CHECK(dual_oracle_exact(theta2(), pf({2.0, 1.0})) == doctest::Approx(2.5));
  CHECK(dual_oracle_exact(theta2(), pf({1.0, 1.0})) == doctest::Approx(1.5));
  CHECK(dual_greedy(full_dependence(), pf({2.0, 1.0})).value == doctest::Approx(2.0));
  CHECK_THROWS_AS(dual_greedy(avar4(), pf({1.0, 1.0, 1.0, 1.0})), NotCompletelyAlternating);
  CHECK_THROWS_AS(dual_oracle_exact(counting(4), pf({1.0, 1.0, 1.0, 1.0})), SizeCapError);
}

TEST_CASE("property: greedy dual equals Choquet and the exact oracle; sampled bound is below") {
  PhiloxStream rng(32, 0);
  for (int t = 0; t < 200; ++t) {
    const auto d = 1 + rng.below(3);
    const auto theta = random_ca_capacity(d, rng);
    const auto f = random_test_function(d, rng);
    const auto g = dual_greedy(theta, f);
    const double ch = choquet_integral(f, theta);
    CHECK(g.value == doctest::Approx(ch).epsilon(1e-9));
    CHECK(dual_oracle_exact(theta, f) == doctest::Approx(ch).epsilon(1e-9));
    CHECK(dual_oracle_sampled(theta, f, 500, t) <= g.value + 1e-9);
    for (std::size_t m = 1; m < theta.table().size(); ++m) {
      const SubsetMask k(static_cast<std::uint32_t>(m));
      CHECK(g.measure(k) <= theta(k) + 1e-9);
    }
  }
}

TEST_CASE("joint CDF reference values") {
  const auto a = mask({0}), b = mask({1});
  const std::vector<CdfPair> pairs{{a, 1.0}, {b, 1.0}};
  CHECK(joint_cdf(TailDependenceFunctional::choquet(full_dependence()), pairs) == doctest::Approx(std::exp(-1.0)));
  CHECK(joint_cdf(TailDependenceFunctional::choquet(counting()), pairs) == doctest::Approx(std::exp(-2.0)));

  const double med = 1.0 / std::log(2.0);
  const std::vector<CdfPair> medians{{a, med}, {b, med}};
  CHECK(joint_cdf(TailDependenceFunctional::choquet(theta2()), medians) ==
        doctest::Approx(0.3535533905932738).epsilon(1e-12));

  CHECK_THROWS_AS(joint_cdf(TailDependenceFunctional::choquet(theta2()), std::vector<CdfPair>{{a, 0.0}}),
                  InvalidArgument);
}

TEST_CASE("property: joint CDF agrees across equivalent representations") {
  PhiloxStream rng(33, 0);
  for (int t = 0; t < 100; ++t) {
    const auto d = 1 + rng.below(4);
    const auto carrier = Carrier::numbered(d);
    std::vector<double> w(d);
    for (auto& v : w) v = rng.uniform(0.1, 2.0);
    const auto leb = TailDependenceFunctional::lebesgue(carrier, DiscreteMeasure(w));
    const auto ch = TailDependenceFunctional::choquet(extremal_coefficients(leb));
    std::vector<CdfPair> pairs;
    for (int i = 0; i < 3; ++i)
      pairs.push_back({SubsetMask(static_cast<std::uint32_t>(1 + rng.below((1U << d) - 1))), rng.uniform(0.2, 3.0)});
    CHECK(joint_cdf(leb, pairs) == doctest::Approx(joint_cdf(ch, pairs)).epsilon(1e-12));
  }
}
