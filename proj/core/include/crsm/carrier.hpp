#pragma once

// Finite carrier spaces, subsets as bit masks, nonnegative point functions
// and sup-measures stored by their values on singletons.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crsm {

/// Largest carrier for which full 2^d set-function tables are built.
inline constexpr std::size_t kMaxCarrierSize = 24;

/// A subset K of the carrier. Bit i set iff point i belongs to K.
class SubsetMask {
 public:
  using bits_type = std::uint32_t;

  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(bits_type bits) : bits_(bits) {}

  static constexpr SubsetMask empty_set() { return SubsetMask{}; }
  static constexpr SubsetMask singleton(std::size_t i) { return SubsetMask{bits_type{1} << i}; }
  /// Mask of the full carrier {0, ..., d-1}.
  static constexpr SubsetMask full(std::size_t d) {
    return SubsetMask{d >= 32 ? ~bits_type{0} : (bits_type{1} << d) - 1};
  }

  constexpr bits_type bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool intersects(SubsetMask o) const { return (bits_ & o.bits_) != 0; }
  constexpr bool subset_of(SubsetMask o) const { return (bits_ & ~o.bits_) == 0; }

  constexpr SubsetMask operator|(SubsetMask o) const { return SubsetMask{bits_ | o.bits_}; }
  constexpr SubsetMask operator&(SubsetMask o) const { return SubsetMask{bits_ & o.bits_}; }
  constexpr SubsetMask& operator|=(SubsetMask o) {
    bits_ |= o.bits_;
    return *this;
  }
  /// Set difference this \ o.
  constexpr SubsetMask minus(SubsetMask o) const { return SubsetMask{bits_ & ~o.bits_}; }
  constexpr SubsetMask with(std::size_t i) const { return SubsetMask{bits_ | (bits_type{1} << i)}; }

  constexpr auto operator<=>(const SubsetMask&) const = default;

  /// Indices of the points in the subset, increasing.
  std::vector<std::size_t> indices() const;

 private:
  bits_type bits_ = 0;
};

/// Cyclic-group structure on a carrier: Z_n (dims = 1) or Z_n x Z_n (dims = 2).
struct TorusShape {
  int side = 1;
  int dims = 1;

  std::size_t points() const { return dims == 1 ? side : static_cast<std::size_t>(side) * side; }
  bool operator==(const TorusShape&) const = default;
};

/// Finite set of labelled points. Labels are opaque, unique, and keep their
/// order; all numeric code works with indices.
class Carrier {
 public:
  /// Throws InvalidArgument for empty or duplicate labels and SizeCapError
  /// beyond kMaxCarrierSize points.
  explicit Carrier(std::vector<std::string> labels, std::optional<TorusShape> torus = std::nullopt);

  /// Points labelled "1", ..., "d".
  static Carrier numbered(std::size_t d);
  /// Torus carrier with labels "i" (1-D) or "i_j" (2-D), row-major.
  static Carrier torus(int side, int dims);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<TorusShape>& torus_shape() const { return torus_; }

  SubsetMask full() const { return SubsetMask::full(size()); }
  std::size_t subset_count() const { return std::size_t{1} << size(); }

  /// Throws InvalidArgument for an unknown label.
  std::size_t index_of(const std::string& label) const;
  SubsetMask mask_of(std::span<const std::string> labels) const;
  /// Labels of K sorted lexicographically.
  std::vector<std::string> sorted_labels(SubsetMask k) const;
  /// Comma-joined sorted labels; the empty set maps to "".
  std::string key_of(SubsetMask k) const;
  /// Inverse of key_of; throws InvalidArgument for unknown labels.
  SubsetMask parse_key(const std::string& key) const;

  bool operator==(const Carrier& o) const { return labels_ == o.labels_ && torus_ == o.torus_; }

 private:
  std::vector<std::string> labels_;
  std::optional<TorusShape> torus_;
};

/// All subsets of `c` in increasing bit order (2^d masks, or 2^d - 1 when
/// `nonempty_only`).
std::vector<SubsetMask> enumerate_subsets(const Carrier& c, bool nonempty_only);

/// Nonnegative finite function on the points of a carrier.
class PointFunction {
 public:
  PointFunction() = default;
  /// Throws InvalidArgument on negative or non-finite entries.
  explicit PointFunction(std::vector<double> values);

  static PointFunction constant(std::size_t d, double c);
  /// c * 1_K on a d-point carrier.
  static PointFunction indicator(std::size_t d, SubsetMask k, double c = 1.0);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  PointFunction scaled(double c) const;
  PointFunction operator+(const PointFunction& o) const;
  /// Pointwise maximum.
  PointFunction max_with(const PointFunction& o) const;
  /// Pointwise f <= g.
  bool dominated_by(const PointFunction& o) const;

 private:
  std::vector<double> values_;
};

/// A sup-measure g^v on a finite carrier, stored by its singleton values;
/// g^v(K) = max over x in K of g(x).
class SupMeasureVector {
 public:
  SupMeasureVector() = default;
  explicit SupMeasureVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double operator()(SubsetMask k) const;

 private:
  std::vector<double> values_;
};

/// max_{x in K} g(x); 0 on the empty set.
double sup_integral(std::span<const double> g, SubsetMask k);
inline double sup_integral(const PointFunction& g, SubsetMask k) { return sup_integral(g.values(), k); }
inline double sup_integral(const SupMeasureVector& g, SubsetMask k) { return sup_integral(g.values(), k); }

}  // namespace crsm
