#pragma once

// Capacity constructors and transformations.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "crsm/carrier.hpp"
#include "crsm/setfun.hpp"

namespace crsm {

/// g(t) = drift t + sum_k w_k (1 - exp(-s_k t)), or t^alpha for the power tag.
/// Valid by construction: nonnegative drift, positive jump atoms, alpha in (0, 1].
class BernsteinFunction {
 public:
  struct Jump {
    double rate = 0.0;    // s_k > 0
    double weight = 0.0;  // w_k > 0
  };

  BernsteinFunction(double drift, std::vector<Jump> jumps);
  static BernsteinFunction power(double alpha);
  static BernsteinFunction identity() { return BernsteinFunction(1.0, {}); }

  double drift() const { return drift_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::optional<double>& power_exponent() const { return alpha_; }

  /// Throws InvalidArgument for t < 0.
  double operator()(double t) const;

 private:
  double drift_ = 0.0;
  std::vector<Jump> jumps_;
  std::optional<double> alpha_;
};

inline double bernstein_eval(const BernsteinFunction& g, double t) { return g(t); }

/// (g o theta)(K) = g(theta(K)).
Capacity compose_capacity(const BernsteinFunction& g, const Capacity& theta);

/// Atom of a distribution on [0, 1].
struct MixingAtom {
  double value = 0.0;
  double probability = 0.0;
};

/// theta(K) = c (1 - E[(1 - zeta)^{|K|}]), the exchangeable (de Finetti) family.
Capacity exchangeable_capacity(const Carrier& carrier, std::span<const MixingAtom> zeta, double c);

/// Uniform random subset of random size k ~ p:
/// theta(K) = c (1 - p_0 - sum_{k=1}^{d-m} [C(d-m, k) / C(d, k)] p_k), m = |K|.
Capacity subset_size_capacity(const Carrier& carrier, std::span<const double> p, double c);

struct Distortion {
  enum class Kind { power, avar };
  Kind kind = Kind::power;
  double alpha = 1.0;

  /// power: t^alpha; avar: min(t, alpha) / alpha.
  double operator()(double t) const;
};

/// theta(K) = g(mu(K)) with mu given by point weights. Nothing is checked
/// beyond alpha in (0, 1]: the average value at risk distortion produces
/// capacities that are not completely alternating, and classify() is the gate.
Capacity distortion_capacity(const Carrier& carrier, std::span<const double> mu, Distortion g);
/// Same with an arbitrary scalar function.
Capacity distortion_capacity(const Carrier& carrier, std::span<const double> mu,
                             const std::function<double(double)>& g);

/// One possible storm shape: a set of torus cells (offsets) with its probability.
struct StormShape {
  std::vector<std::vector<int>> cells;  // each cell has `dims` coordinates
  double probability = 0.0;
};

/// Stationary storm capacity on Z_n or Z_n^2:
/// theta(K) = scale * E |K + reflected(Xi)|, counting measure on the torus.
Capacity torus_storm_capacity(int side, int dims, std::span<const StormShape> shape, double scale = 1.0);

/// Image of K under the cyclic shift by `offset` (one coordinate per dimension).
SubsetMask torus_shift(const TorusShape& torus, SubsetMask k, std::span<const int> offset);

/// theta(K + v) == theta(K) for every K and shift v, exactly. Throws
/// InvalidArgument when the carrier has no torus structure.
bool check_stationary(const Capacity& theta);

}  // namespace crsm
