#include "crsm/carrier.hpp"

#include "crsm/errors.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace crsm;
using crsm::testing::mask;

TEST_CASE("sup_integral takes the maximum over the subset") {
  const std::vector<double> g{1.0, 0.5};
  CHECK(sup_integral(g, SubsetMask::full(2)) == 1.0);
  CHECK(sup_integral(g, SubsetMask::empty_set()) == 0.0);

  const std::vector<double> h{2.0, 7.0, 3.0};
  CHECK(sup_integral(h, mask({0, 2})) == 3.0);
}

TEST_CASE("sup_integral is maxitive and monotone on all subset pairs") {
  PhiloxStream rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> g(5);
    for (auto& v : g) v = rng.uniform(0.0, 3.0);
    for (std::uint32_t k1 = 0; k1 < 32; ++k1) {
      for (std::uint32_t k2 = 0; k2 < 32; ++k2) {
        const SubsetMask a(k1), b(k2);
        CHECK(sup_integral(g, a | b) == std::max(sup_integral(g, a), sup_integral(g, b)));
        if (a.subset_of(b)) CHECK(sup_integral(g, a) <= sup_integral(g, b));
      }
    }
  }
}

TEST_CASE("enumerate_subsets yields masks in increasing order") {
  const auto two = enumerate_subsets(Carrier({"a", "b"}), true);
  REQUIRE(two.size() == 3);
  CHECK(two[0] == mask({0}));
  CHECK(two[1] == mask({1}));
  CHECK(two[2] == mask({0, 1}));

  const auto one = enumerate_subsets(Carrier({"a"}), false);
  REQUIRE(one.size() == 2);
  CHECK(one[0].empty());

  CHECK(enumerate_subsets(Carrier::numbered(3), false).size() == 8);
}

TEST_CASE("carrier validation") {
  CHECK_THROWS_AS(Carrier(std::vector<std::string>{}), InvalidArgument);
  CHECK_THROWS_AS(Carrier({"a", "a"}), InvalidArgument);
  CHECK_THROWS_AS(Carrier({"a,b"}), InvalidArgument);
  CHECK_THROWS_AS(Carrier::numbered(25), SizeCapError);
  CHECK_NOTHROW(Carrier::numbered(24));
  CHECK_THROWS_AS(Carrier::torus(5, 2), SizeCapError);
}

TEST_CASE("subset keys are sorted label lists") {
  const Carrier c({"b", "a", "c"});
  CHECK(c.key_of(mask({0, 1})) == "a,b");
  CHECK(c.key_of(SubsetMask{}) == "");
  CHECK(c.parse_key("b,a") == mask({0, 1}));
  CHECK(c.parse_key("") == SubsetMask{});
  CHECK_THROWS_AS(c.parse_key("a,z"), InvalidArgument);
  CHECK_THROWS_AS(c.parse_key("a,a"), InvalidArgument);
  for (std::uint32_t m = 0; m < 8; ++m) CHECK(c.parse_key(c.key_of(SubsetMask(m))) == SubsetMask(m));
}

TEST_CASE("point functions reject negative and non-finite values") {
  CHECK_THROWS_AS(PointFunction({1.0, -0.5}), InvalidArgument);
  CHECK_THROWS_AS(PointFunction({std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(PointFunction({INFINITY}), InvalidArgument);
  const auto f = PointFunction::indicator(3, mask({1}), 2.5);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 2.5);
  CHECK_THROWS_AS(f + PointFunction::constant(2, 1.0), CarrierMismatch);
}

TEST_CASE("torus carrier labels") {
  const auto t1 = Carrier::torus(4, 1);
  CHECK(t1.label(3) == "3");
  const auto t2 = Carrier::torus(3, 2);
  CHECK(t2.size() == 9);
  CHECK(t2.label(5) == "1_2");
  REQUIRE(t2.torus_shape().has_value());
  CHECK(t2.torus_shape()->dims == 2);
}
