#pragma once

// Choquet and extremal integrals of point functions with respect to
// capacities, plus comonotonicity tools.

#include <cstdint>
#include <functional>
#include <optional>

#include "crsm/carrier.hpp"
#include "crsm/setfun.hpp"

namespace crsm {

/// Any functional on nonnegative point functions of a fixed carrier.
using Functional = std::function<double(const PointFunction&)>;

/// Layer-cake integral: with the distinct values v_1 > ... > v_m > v_{m+1} = 0,
/// sum_i (v_i - v_{i+1}) theta({f >= v_i}).
double choquet_integral(const PointFunction& f, const Capacity& theta);

/// sup_t t theta({f >= t}) = max over distinct values v of v theta({f >= v}).
double extremal_integral(const PointFunction& f, const Capacity& theta);

/// Subset form of the extremal integral, max over nonempty K of
/// theta(K) min_{x in K} f(x). O(d 2^d); used to cross-check the threshold form.
double extremal_integral_subset_form(const PointFunction& f, const Capacity& theta);

/// (f(x) - f(y)) (g(x) - g(y)) >= 0 for every pair of points.
bool comonotonic(const PointFunction& f, const PointFunction& g);

/// Increment form over the ascending order u_(1) <= ... <= u_(d) (ties by
/// index): u_(1) theta(E) + sum_{k>=2} (u_(k) - u_(k-1)) theta(top d-k+1 points).
double comonotone_formula(const PointFunction& u, const Capacity& theta);

struct ComonotoneAdditivityReport {
  int trials = 0;
  double max_deviation = 0.0;
  /// Pair attaining max_deviation, set only when it exceeds the tolerance.
  std::optional<std::pair<PointFunction, PointFunction>> witness;
  bool additive() const { return !witness.has_value(); }
};

/// Draws `trials` comonotonic pairs (f, g) on a `dimension`-point carrier by
/// applying two independent random nondecreasing step transforms to one
/// shared random vector, and records max |l(f + g) - l(f) - l(g)|.
/// A deviation above `tolerance` (default 1e-7) is reported with its witness.
ComonotoneAdditivityReport comonotone_additivity_check(const Functional& ell, std::size_t dimension, int trials,
                                                       std::uint64_t seed, double tolerance = 1e-7);

}  // namespace crsm
