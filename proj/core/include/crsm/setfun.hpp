#pragma once

// Capacities on a finite carrier stored as full 2^d tables, successive
// differences, Moebius inversion (the finite Choquet theorem) and
// classification.
//
// On a finite discrete carrier every set function is upper semicontinuous,
// so a table theta with theta(empty) = 0 is an extremal coefficient
// functional exactly when it is completely alternating, which in turn holds
// exactly when its Moebius measure nu is nonnegative:
//
//   theta(K) = sum_{F : F cap K != empty} nu(F).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "crsm/carrier.hpp"

namespace crsm {

/// Absolute tolerance for set-function identities (default 1e-9).
double set_function_tolerance();
void set_set_function_tolerance(double tol);

/// A set function theta on all subsets of a carrier with theta(empty) = 0.
/// Monotonicity and complete alternation are not enforced; `classify`
/// reports them, so invalid capacities stay representable.
class Capacity {
 public:
  /// `table[m]` is the value on the subset with bit pattern m. Throws
  /// InvalidArgument when the size is not 2^d, when table[0] != 0 or on
  /// non-finite or negative (beyond tolerance) entries.
  Capacity(Carrier carrier, std::vector<double> table);

  /// Tabulates `fn` over every subset; the value on the empty set is forced to 0.
  static Capacity tabulate(Carrier carrier, const std::function<double(SubsetMask)>& fn);

  const Carrier& carrier() const { return carrier_; }
  std::size_t dimension() const { return carrier_.size(); }
  std::span<const double> table() const { return table_; }
  double operator()(SubsetMask k) const { return table_[k.bits()]; }
  double total() const { return table_.back(); }

 private:
  Carrier carrier_;
  std::vector<double> table_;
};

/// Weights nu(F) on nonempty subsets F. Entries may be negative: that is
/// how a capacity that is not completely alternating shows itself.
class MobiusMeasure {
 public:
  /// `weights[m]` for each bit pattern m; weights[0] must be 0.
  MobiusMeasure(Carrier carrier, std::vector<double> weights);

  const Carrier& carrier() const { return carrier_; }
  std::span<const double> weights() const { return weights_; }
  double operator()(SubsetMask f) const { return weights_[f.bits()]; }
  double total_mass() const;

 private:
  Carrier carrier_;
  std::vector<double> weights_;
};

/// Delta_{K_n} ... Delta_{K_1} theta(K), where Delta_{L} phi(K) = phi(K) - phi(K cup L).
/// Evaluated by the recursive definition.
double successive_difference(const Capacity& theta, SubsetMask k, std::span<const SubsetMask> family);

/// Moebius measure of theta via fast subset transforms, O(d 2^d).
MobiusMeasure mobius_inverse(const Capacity& theta);

/// theta(K) = sum over F hitting K of nu(F).
Capacity capacity_from_measure(const MobiusMeasure& nu);

struct Classification {
  bool monotone = false;
  bool completely_alternating = false;
  bool maxitive = false;
  bool additive = false;
  /// Most negative Moebius weight (or the smallest weight when none is negative).
  double min_weight = 0.0;
  SubsetMask min_witness;
};

Classification classify(const Capacity& theta);

struct AlternationReport {
  bool violation = false;
  bool exhaustive = false;
  std::uint64_t families_checked = 0;
  /// Largest successive difference seen; a violation when > tolerance.
  double max_value = 0.0;
  SubsetMask base;
  std::vector<SubsetMask> family;
};

/// Direct evaluation of successive differences up to `max_order`. Exhaustive
/// for d <= 3; otherwise 10,000 families with n uniform on 1..max_order and
/// every set uniform over nonempty subsets, drawn from `seed`.
AlternationReport check_complete_alternation_direct(const Capacity& theta, int max_order, std::uint64_t seed);

}  // namespace crsm
