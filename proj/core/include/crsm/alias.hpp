#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crsm/rng.hpp"

namespace crsm {

/// Walker/Vose alias table: O(n) construction, O(1) draws from a discrete
/// distribution proportional to nonnegative weights.
class AliasTable {
 public:
  AliasTable() = default;
  /// Throws InvalidArgument if a weight is negative or non-finite, or all are zero.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t draw(PhiloxStream& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace crsm
