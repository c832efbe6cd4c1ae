#include "crsm/alias.hpp"

#include <cmath>

#include "crsm/errors.hpp"

namespace crsm {

AliasTable::AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("alias table weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("alias table needs positive total weight");

  const auto n = weights.size();
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  std::size_t any_positive = 0;
  while (!(weights[any_positive] > 0.0)) ++any_positive;
  for (auto i : small) {
    const bool positive = weights[i] > 0.0;
    prob_[i] = positive ? 1.0 : 0.0;
    alias_[i] = positive ? i : any_positive;
  }
}

std::size_t AliasTable::draw(PhiloxStream& rng) const {
  const auto column = static_cast<std::size_t>(rng.below(prob_.size()));
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

}  // namespace crsm
