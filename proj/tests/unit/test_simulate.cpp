#include "crsm/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "crsm/errors.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace crsm;
using namespace crsm::testing;

namespace {

SimConfig config(std::uint64_t seed, std::size_t n) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.samples = n;
  return cfg;
}

}  // namespace

TEST_CASE("mode parsing") {
  const auto ex = with_mode(SimConfig{}, "exact");
  CHECK(ex.mode == SimMode::exact);
  const auto tr = with_mode(SimConfig{}, "truncated:12");
  CHECK(tr.mode == SimMode::truncated);
  CHECK(tr.truncation_terms == 12);
  CHECK_THROWS_AS(with_mode(SimConfig{}, "truncated:0"), InvalidArgument);
  CHECK_THROWS_AS(with_mode(SimConfig{}, "truncated:x"), InvalidArgument);
  CHECK_THROWS_AS(with_mode(SimConfig{}, "fast"), InvalidArgument);
}

TEST_CASE("exact mode is deterministic across thread counts") {
  auto cfg = config(99, 2000);
  cfg.threads = 1;
  const auto one = simulate_crsm(theta2(), cfg);
  cfg.threads = 7;
  const auto seven = simulate_crsm(theta2(), cfg);
  CHECK(one == seven);
  cfg.seed = 100;
  CHECK_FALSE(one == simulate_crsm(theta2(), cfg));

  const auto sampler = SpectralSampler::from_atoms({{0.5, pf({1.0, 0.2})}, {0.5, pf({0.3, 2.0})}});
  cfg.threads = 1;
  const auto s1 = simulate_spectral(sampler, ab(), cfg);
  cfg.threads = 5;
  CHECK(s1 == simulate_spectral(sampler, ab(), cfg));
}

TEST_CASE("full dependence gives equal coordinates") {
  const auto batch = simulate_crsm(full_dependence(3), config(1, 500));
  for (std::size_t j = 0; j < batch.samples(); ++j) {
    const auto r = batch.row(j);
    CHECK(r[0] == r[1]);
    CHECK(r[1] == r[2]);
    CHECK(batch.terms()[j] == 1);
  }
}

TEST_CASE("structural zeros are exactly zero") {
  const Capacity th(Carrier({"a", "b", "c"}), {0.0, 1.0, 0.0, 1.0, 0.5, 1.5, 0.5, 1.5});
  REQUIRE(classify(th).completely_alternating);
  const auto batch = simulate_crsm(th, config(3, 3000));
  for (std::size_t j = 0; j < batch.samples(); ++j) CHECK(batch.row(j)[1] == 0.0);

  const auto sampler = SpectralSampler::from_atoms({{0.5, pf({1.0, 0.0})}, {0.5, pf({0.5, 0.0})}});
  CHECK(sampler.structural_zeros == mask({1}));
  const auto sb = simulate_spectral(sampler, ab(), config(4, 3000));
  for (std::size_t j = 0; j < sb.samples(); ++j) CHECK(sb.row(j)[1] == 0.0);
}

TEST_CASE("first LePage set is an argmax set of each CRSM sample") {
  const auto batch = simulate_crsm(theta2(), config(5, 5000));
  for (std::size_t j = 0; j < batch.samples(); ++j) CHECK(argmax_set(batch.row(j)) == batch.first_sets()[j]);
}

TEST_CASE("Frechet scale estimates match the tail dependence functional") {
  const auto model = TailDependenceFunctional::choquet(theta2());
  const auto batch = simulate(model, config(6, 40000));
  for (const auto& f : {pf({1.0, 1.0}), pf({2.0, 1.0}), pf({0.0, 1.0})}) {
    const auto r = check_scale(model, batch, f);
    CHECK(r.pass);
  }
  const auto a = frechet_scale_estimate(batch.values_on(SubsetMask::full(2)));
  CHECK(a.half_width == doctest::Approx(3.0 * a.scale / std::sqrt(40000.0)));
  CHECK_THROWS_AS(frechet_scale_estimate(std::vector<double>(10, 1.0)), InvalidArgument);
}

TEST_CASE("truncation biases the scale downward") {
  const auto th = counting(4);
  auto cfg = config(8, 40000);
  const auto exact = simulate_crsm(th, cfg);
  cfg = with_mode(cfg, "truncated:1");
  const auto trunc = simulate_crsm(th, cfg);
  // With f constant, X(E) comes from the first term alone, so f must vary.
  const auto f = pf({1.0, 0.5, 0.5, 0.5});
  const double se = frechet_scale_estimate(exact.extremal_integrals(f)).scale;
  const double st = frechet_scale_estimate(trunc.extremal_integrals(f)).scale;
  CHECK(st < se);
  // Same (Gamma_i, Xi_i) stream: truncated samples are pathwise below exact ones.
  for (std::size_t j = 0; j < exact.samples(); ++j)
    for (std::size_t x = 0; x < 4; ++x) CHECK(trunc.row(j)[x] <= exact.row(j)[x]);
}

TEST_CASE("empirical joint CDF matches the closed form on small models") {
  PhiloxStream rng(9, 0);
  for (int t = 0; t < 6; ++t) {
    const auto d = 1 + rng.below(3);
    const auto th = random_ca_capacity(d, rng);
    const auto model = TailDependenceFunctional::choquet(th);
    const auto batch = simulate(model, config(100 + t, 20000));
    for (int q = 0; q < 3; ++q) {
      const SubsetMask k(static_cast<std::uint32_t>(1 + rng.below((1U << d) - 1)));
      const std::vector<CdfPair> pairs{{k, th(k) * rng.uniform(0.5, 3.0)}};
      CHECK(check_joint_cdf(model, batch, pairs).pass);
    }
  }
}

TEST_CASE("coupling orders the three series pathwise") {
  const auto sampler = SpectralSampler::deterministic(pf({1.0, 0.5}));
  const auto c = couple(sampler, ab(), config(10, 5000));
  std::size_t strict_b = 0;
  for (std::size_t j = 0; j < 5000; ++j) {
    for (std::size_t x = 0; x < 2; ++x) {
      CHECK(c.lower.row(j)[x] <= c.middle.row(j)[x]);
      CHECK(c.middle.row(j)[x] <= c.upper.row(j)[x]);
    }
    strict_b += c.lower.row(j)[1] < c.middle.row(j)[1];
    CHECK(c.lower.row(j)[1] == 0.0);
  }
  CHECK(strict_b == 5000);

  // Indicator-valued spectral measures collapse the coupling.
  const auto ind = SpectralSampler::from_atoms({{0.5, pf({2.0, 2.0})}, {0.5, pf({2.0, 0.0})}});
  const auto ci = couple(ind, ab(), config(11, 2000));
  CHECK(ci.lower == ci.middle);
  CHECK(ci.middle == ci.upper);

  SpectralSampler unbounded = sampler;
  unbounded.bound.reset();
  CHECK_THROWS_AS(couple(unbounded, ab(), config(1, 10)), InvalidArgument);
}

TEST_CASE("argmax independence holds and the control detects dependence") {
  const auto r = argmax_independence_test(theta2(), config(12, 40000), mask({0}));
  CHECK(r.pass);
  CHECK(std::abs(r.control_z) > 4.0);
  CHECK(r.argmax_matches_first_set == 40000);
  CHECK(std::abs(r.hit_frequency - r.hit_probability) < 4 * std::sqrt(0.25 / 40000));
  CHECK(r.hit_probability == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("continuity bound") {
  const auto r = continuity_bound_check(theta2(), mask({0}), mask({1}), 2.0, config(13, 10000));
  CHECK(r.bound == doctest::Approx(0.5));
  CHECK(r.pass);

  const auto same = continuity_bound_check(theta2(), mask({0}), mask({0}), 0.1, config(13, 2000));
  CHECK(same.bound == 0.0);
  CHECK(same.exceedance == 0.0);

  const auto full = continuity_bound_check(full_dependence(), mask({0}), mask({0, 1}), 0.01, config(13, 2000));
  CHECK(full.bound == 0.0);
  CHECK(full.exceedance == 0.0);
  CHECK(full.pass);
}

TEST_CASE("independence on disjoint sets") {
  const std::vector<SubsetMask> parts{mask({0}), mask({1})};
  const auto add = independence_on_disjoint(counting(), parts, config(14, 20000));
  CHECK(add.additive);
  CHECK(add.pass);
  const auto dep = independence_on_disjoint(theta2(), parts, config(14, 20000));
  CHECK_FALSE(dep.additive);
  CHECK(dep.dependence_detected);
  CHECK(dep.pass);
  const std::vector<SubsetMask> single{mask({0, 1})};
  CHECK(independence_on_disjoint(theta2(), single, config(14, 100)).pass);
  const std::vector<SubsetMask> overlap{mask({0}), mask({0, 1})};
  CHECK_THROWS_AS(independence_on_disjoint(theta2(), overlap, config(14, 100)), InvalidArgument);
}

TEST_CASE("simulation preconditions") {
  CHECK_THROWS_AS(simulate_crsm(avar4(), config(1, 10)), NotCompletelyAlternating);
  auto cfg = config(1, 10);
  cfg.max_terms = 1;
  CHECK_THROWS_AS(simulate_crsm(counting(4), cfg), MaxTermsExceeded);
  SpectralSampler s = SpectralSampler::deterministic(pf({1.0, 0.5}));
  s.bound.reset();
  CHECK_THROWS_AS(simulate_spectral(s, ab(), config(1, 10)), InvalidArgument);
  CHECK_THROWS_AS(argmax_set(std::vector<double>{0.0, 0.0}), InvalidArgument);
}
