#include "crsm/rng.hpp"

#include <cmath>

#include "crsm/alias.hpp"
#include "doctest.h"

using namespace crsm;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::counter_type;
  using K = Philox4x32::key_type;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  PhiloxStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
}

TEST_CASE("derived variates have the right moments") {
  PhiloxStream rng(1, 0);
  const int n = 200000;
  double su = 0.0, se = 0.0, se2 = 0.0;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    su += u;
    const double e = rng.exponential();
    se += e;
    se2 += e * e;
    ++counts[rng.below(7)];
  }
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(se / n - 1.0) < 4 * std::sqrt(1.0 / n));
  CHECK(std::abs(se2 / n - 2.0) < 4 * std::sqrt(20.0 / n));
  for (int c : counts) CHECK(std::abs(c - n / 7.0) < 4 * std::sqrt(n * (1.0 / 7) * (6.0 / 7)));
}

TEST_CASE("alias table reproduces its weights and never draws zero-weight columns") {
  const std::vector<double> w{0.0, 1.0, 3.0, 0.0, 4.0};
  const AliasTable table(w);
  PhiloxStream rng(2, 0);
  const int n = 200000;
  std::vector<int> counts(w.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[table.draw(rng)];
  CHECK(counts[0] == 0);
  CHECK(counts[3] == 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = w[i] / 8.0;
    CHECK(std::abs(counts[i] - n * p) <= 4 * std::sqrt(n * p * (1 - p)) + 1e-9);
  }
}
