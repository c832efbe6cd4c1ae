#include "crsm/integrals.hpp"

#include <algorithm>
#include <cmath>

#include "crsm/errors.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace crsm;
using namespace crsm::testing;

namespace {

// Riemann sum of t -> theta({f >= t}); exact because the integrand is a step function.
double layer_cake(const PointFunction& f, const Capacity& theta) {
  std::vector<double> levels(f.values().begin(), f.values().end());
  levels.push_back(0.0);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double s = 0.0;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double mid = 0.5 * (levels[i - 1] + levels[i]);
    SubsetMask up;
    for (std::size_t x = 0; x < f.size(); ++x)
      if (f[x] >= mid) up = up.with(x);
    s += (levels[i] - levels[i - 1]) * theta(up);
  }
  return s;
}

}  // namespace

TEST_CASE("Choquet integral reference values") {
  CHECK(choquet_integral(pf({2.0, 1.0}), theta2()) == doctest::Approx(2.5));
  CHECK(choquet_integral(pf({2.0, 1.0}), full_dependence()) == doctest::Approx(2.0));
  CHECK(choquet_integral(pf({2.0, 1.0}), counting()) == doctest::Approx(3.0));
  CHECK(choquet_integral(pf({0.0, 0.0}), theta2()) == 0.0);
}

TEST_CASE("extremal integral reference values") {
  CHECK(extremal_integral(pf({2.0, 1.0}), theta2()) == doctest::Approx(2.0));
  CHECK(extremal_integral(pf({1.0, 1.0}), theta2()) == doctest::Approx(1.5));
  CHECK(extremal_integral(pf({0.0, 0.0}), theta2()) == 0.0);
}

TEST_CASE("property: integrals against oracles, homogeneity and ordering") {
  PhiloxStream rng(21, 0);
  for (int t = 0; t < 300; ++t) {
    const auto d = 1 + rng.below(6);
    const auto theta = random_ca_capacity(d, rng);
    const auto f = random_test_function(d, rng);
    const double ch = choquet_integral(f, theta);
    const double ex = extremal_integral(f, theta);
    CHECK(ch == doctest::Approx(layer_cake(f, theta)).epsilon(1e-12));
    CHECK(ex == doctest::Approx(extremal_integral_subset_form(f, theta)).epsilon(1e-12));
    CHECK(ex <= ch * (1 + 1e-12) + 1e-12);

    const double c = rng.uniform(0.1, 5.0);
    CHECK(choquet_integral(f.scaled(c), theta) == doctest::Approx(c * ch).epsilon(1e-12));
    CHECK(extremal_integral(f.scaled(c), theta) == doctest::Approx(c * ex).epsilon(1e-12));

    // Completely alternating capacities are submodular, so Choquet is subadditive.
    const auto g = random_test_function(d, rng);
    CHECK(choquet_integral(f + g, theta) <= ch + choquet_integral(g, theta) + 1e-9);

    for (std::size_t m = 0; m < theta.carrier().subset_count(); ++m) {
      const SubsetMask k(static_cast<std::uint32_t>(m));
      const auto ind = PointFunction::indicator(d, k);
      CHECK(choquet_integral(ind, theta) == doctest::Approx(theta(k)));
      CHECK(extremal_integral(ind, theta) == doctest::Approx(theta(k)));
    }
  }
}

TEST_CASE("comonotone formula matches the Choquet integral exactly") {
  PhiloxStream rng(22, 0);
  for (int t = 0; t < 500; ++t) {
    const auto d = 1 + rng.below(8);
    const auto theta = random_table(d, rng);
    const auto f = random_test_function(d, rng);
    CHECK(comonotone_formula(f, theta) == choquet_integral(f, theta));
  }
}

TEST_CASE("comonotonicity predicate") {
  CHECK(comonotonic(pf({1.0, 2.0, 3.0}), pf({0.0, 0.0, 5.0})));
  CHECK_FALSE(comonotonic(pf({1.0, 2.0}), pf({2.0, 1.0})));
  CHECK(comonotonic(pf({1.0, 1.0}), pf({2.0, 1.0})));
}

TEST_CASE("comonotone additivity separates Choquet from extremal integrals") {
  const auto theta = theta2();
  const Functional choquet = [&](const PointFunction& f) { return choquet_integral(f, theta); };
  const auto rc = comonotone_additivity_check(choquet, 2, 2000, 1);
  CHECK(rc.additive());
  CHECK(rc.max_deviation < 1e-12);

  // Extremal integral of a sup-measure is maxitive, not additive.
  const auto sup = sup_measure_g();
  const Functional extremal = [&](const PointFunction& f) { return extremal_integral(f, sup); };
  const auto re = comonotone_additivity_check(extremal, 2, 2000, 1);
  CHECK_FALSE(re.additive());
  REQUIRE(re.witness.has_value());
  CHECK(comonotonic(re.witness->first, re.witness->second));
  const auto& [f, g] = *re.witness;
  CHECK(std::abs(extremal(f + g) - extremal(f) - extremal(g)) == doctest::Approx(re.max_deviation));
}

TEST_CASE("integrals reject mismatched carriers") {
  CHECK_THROWS_AS(choquet_integral(pf({1.0, 2.0, 3.0}), theta2()), CarrierMismatch);
  CHECK_THROWS_AS(extremal_integral(pf({1.0}), theta2()), CarrierMismatch);
}
