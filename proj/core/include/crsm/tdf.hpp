#pragma once

// Tail dependence functionals l(f), the Frechet scale of the extremal
// integral of f with respect to a max-stable random sup-measure X.
//
// Three exact representations are supported:
//   Choquet(theta)  l(f) = Choquet integral of f w.r.t. theta (CRSMs),
//   Spectral(Y)     l(f) = E max_x f(x) Y(x) for a finitely supported
//                   spectral sup-measure Y (LePage representation),
//   Lebesgue(mu)    l(f) = sum_x f(x) mu(x) (completely random X).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crsm/carrier.hpp"
#include "crsm/integrals.hpp"
#include "crsm/rng.hpp"
#include "crsm/setfun.hpp"

namespace crsm {

/// Nonnegative weights on points; mu(K) = sum over K.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  double operator()(SubsetMask k) const;

 private:
  std::vector<double> weights_;
};

/// One atom of a finitely supported spectral law: Y = y with probability p.
struct SpectralAtom {
  double probability = 0.0;
  PointFunction values;
};

class TailDependenceFunctional {
 public:
  enum class Kind { choquet, spectral, lebesgue };

  struct ChoquetForm {
    Capacity theta;
  };
  struct SpectralForm {
    Carrier carrier;
    std::vector<SpectralAtom> atoms;
  };
  struct LebesgueForm {
    Carrier carrier;
    DiscreteMeasure mu;
  };

  static TailDependenceFunctional choquet(Capacity theta);
  /// Probabilities must be positive and sum to 1 (within 1e-9); spectral
  /// normalisation of Y is not imposed.
  static TailDependenceFunctional spectral(Carrier carrier, std::vector<SpectralAtom> atoms);
  static TailDependenceFunctional lebesgue(Carrier carrier, DiscreteMeasure mu);

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  const Carrier& carrier() const;
  std::size_t dimension() const { return carrier().size(); }

  const ChoquetForm* as_choquet() const { return std::get_if<ChoquetForm>(&rep_); }
  const SpectralForm* as_spectral() const { return std::get_if<SpectralForm>(&rep_); }
  const LebesgueForm* as_lebesgue() const { return std::get_if<LebesgueForm>(&rep_); }

  /// Wraps `eval` for use with generic checkers.
  Functional as_functional() const;

 private:
  explicit TailDependenceFunctional(std::variant<ChoquetForm, SpectralForm, LebesgueForm> rep)
      : rep_(std::move(rep)) {}
  std::variant<ChoquetForm, SpectralForm, LebesgueForm> rep_;
};

std::string to_string(TailDependenceFunctional::Kind kind);

double eval(const TailDependenceFunctional& ell, const PointFunction& f);

/// theta(K) = l(1_K) for every K.
Capacity extremal_coefficients(const TailDependenceFunctional& ell);

struct MaxAlternationReport {
  int order = 0;
  int trials = 0;
  double max_value = 0.0;
  bool violation = false;
  /// (u, u_1, ..., u_n) attaining max_value.
  std::vector<PointFunction> witness;
};

/// Samples u, u_1..u_n and evaluates the nested max-differences
///   sum_{S subset of 1..n} (-1)^{|S|} l(u v max_{i in S} u_i),
/// flagging values above `tolerance` (default 1e-7). Order n in 1..5.
MaxAlternationReport check_max_complete_alternation(const Functional& ell, std::size_t dimension, int order,
                                                    int trials, std::uint64_t seed, double tolerance = 1e-7);

/// Choquet(extremal_coefficients(l)): the CRSM functional with the same
/// extremal coefficients as l. It dominates l pointwise, with equality for
/// all f iff l is comonotonic additive.
TailDependenceFunctional crsm_envelope(const TailDependenceFunctional& ell);

struct GreedyDual {
  DiscreteMeasure measure;
  double value = 0.0;
};

/// Greedy optimum of max { sum f mu : mu >= 0, mu(K) <= theta(K) for all K }.
/// Requires a completely alternating theta (throws NotCompletelyAlternating).
/// Ties in f are broken by carrier index; the value does not depend on it.
GreedyDual dual_greedy(const Capacity& theta, const PointFunction& f);

/// Exact optimum of the same linear program by vertex enumeration
/// (d <= 3, otherwise SizeCapError).
double dual_oracle_exact(const Capacity& theta, const PointFunction& f);

/// Lower bound: best objective over feasible measures found by rejection
/// sampling from the box prod_x [0, theta({x})].
double dual_oracle_sampled(const Capacity& theta, const PointFunction& f, int draws, std::uint64_t seed);

struct DominationReport {
  int trials = 0;
  double min_difference = 0.0;
  PointFunction argmin;
  bool dominates = false;
};

/// min over random f of l1(f) - l2(f); domination when >= -1e-9.
DominationReport dominates(const TailDependenceFunctional& l1, const TailDependenceFunctional& l2, int trials,
                           std::uint64_t seed);

/// Random nonnegative test function with mixed scales and occasional zeros.
PointFunction random_test_function(std::size_t dimension, PhiloxStream& rng);

struct CdfPair {
  SubsetMask set;
  double level = 0.0;
};

/// P(X(K_i) <= a_i for all i) for the max-stable sup-measure with
/// functional `model`. Levels must be positive.
double joint_cdf(const TailDependenceFunctional& model, std::span<const CdfPair> pairs);

}  // namespace crsm
