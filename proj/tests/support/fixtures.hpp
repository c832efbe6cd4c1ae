#pragma once

#include <cmath>
#include <vector>

#include "crsm/carrier.hpp"
#include "crsm/rng.hpp"
#include "crsm/setfun.hpp"
#include "crsm/tdf.hpp"
#include "crsm/transforms.hpp"

namespace crsm::testing {

inline Carrier ab() { return Carrier({"a", "b"}); }

/// theta({a}) = theta({b}) = 1, theta({a,b}) = 1.5.
inline Capacity theta2() { return Capacity(ab(), {0.0, 1.0, 1.0, 1.5}); }

/// theta(K) = 1 for every nonempty K.
inline Capacity full_dependence(std::size_t d = 2) {
  return Capacity::tabulate(d == 2 ? ab() : Carrier::numbered(d), [](SubsetMask) { return 1.0; });
}

/// theta(K) = sum of unit weights over K.
inline Capacity counting(std::size_t d = 2) {
  return Capacity::tabulate(d == 2 ? ab() : Carrier::numbered(d), [](SubsetMask k) { return double(k.size()); });
}

/// Average value at risk distortion of the uniform probability on 4 points, alpha = 0.8.
inline Capacity avar4() {
  const std::vector<double> mu(4, 0.25);
  return distortion_capacity(Carrier::numbered(4), mu, Distortion{Distortion::Kind::avar, 0.8});
}

/// Sup-measure of g = (1, 0.5).
inline Capacity sup_measure_g() {
  const std::vector<double> g{1.0, 0.5};
  return Capacity::tabulate(ab(), [&](SubsetMask k) { return sup_integral(g, k); });
}

/// Completely alternating capacity from random nonnegative Moebius weights.
inline Capacity random_ca_capacity(std::size_t d, PhiloxStream& rng) {
  const auto c = Carrier::numbered(d);
  std::vector<double> w(c.subset_count(), 0.0);
  for (std::size_t m = 1; m < w.size(); ++m) w[m] = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.0, 1.0);
  w.back() += 0.05;  // theta(E) > 0
  return capacity_from_measure(MobiusMeasure(c, std::move(w)));
}

/// Arbitrary table with theta(empty) = 0 (typically not monotone).
inline Capacity random_table(std::size_t d, PhiloxStream& rng) {
  const auto c = Carrier::numbered(d);
  std::vector<double> t(c.subset_count(), 0.0);
  for (std::size_t m = 1; m < t.size(); ++m) t[m] = rng.uniform(0.0, double(d));
  return Capacity(c, std::move(t));
}

inline PointFunction pf(std::vector<double> v) { return PointFunction(std::move(v)); }

inline SubsetMask mask(std::initializer_list<std::size_t> idx) {
  SubsetMask m;
  for (auto i : idx) m = m.with(i);
  return m;
}

}  // namespace crsm::testing
