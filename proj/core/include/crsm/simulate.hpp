#pragma once

// LePage-series Monte Carlo for max-stable random sup-measures on a finite
// carrier,
//
//   X(K) = max_i Gamma_i^{-1} Y_i(K),
//
// with Gamma_1 < Gamma_2 < ... the points of a unit-rate Poisson process on
// the half-line and Y_i i.i.d. spectral sup-measures. For a CRSM with
// extremal coefficients theta, Y_i = theta(E) 1{Xi_i hits K} where the
// nonempty random set Xi has P(Xi = F) = nu(F) / theta(E).
//
// Exact mode stops at the first n with c / Gamma_n below the smallest
// running maximum over the points that can ever be positive, where c bounds
// every spectral value (theta(E), or the sampler's declared bound). No later
// term can change any maximum, so the draw is exact. Truncated mode keeps a
// fixed number of terms and is stochastically smaller than the true law.
//
// Sample j uses PhiloxStream(seed, j), so batches are identical whatever the
// thread count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crsm/carrier.hpp"
#include "crsm/rng.hpp"
#include "crsm/setfun.hpp"
#include "crsm/tdf.hpp"

namespace crsm {

enum class SimMode { exact, truncated };

struct SimConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  SimMode mode = SimMode::exact;
  /// Number of LePage terms in truncated mode.
  std::size_t truncation_terms = 1;
  /// Exact mode gives up (MaxTermsExceeded) beyond this many terms per sample.
  std::size_t max_terms = 1'000'000;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
};

/// Parses "exact" or "truncated:K".
SimConfig with_mode(SimConfig cfg, const std::string& mode);

/// Realisations of X stored by singleton values, one row per sample.
class SampleBatch {
 public:
  SampleBatch(Carrier carrier, std::size_t samples);

  const Carrier& carrier() const { return carrier_; }
  std::size_t samples() const { return samples_; }
  std::size_t dimension() const { return carrier_.size(); }

  std::span<const double> row(std::size_t j) const { return {values_.data() + j * dimension(), dimension()}; }
  std::span<double> row(std::size_t j) { return {values_.data() + j * dimension(), dimension()}; }
  SupMeasureVector realisation(std::size_t j) const;

  /// X_j(K) for every sample.
  std::vector<double> values_on(SubsetMask k) const;
  /// Extremal integral max_x f(x) X_j({x}) for every sample.
  std::vector<double> extremal_integrals(const PointFunction& f) const;

  /// First LePage set Xi_1 per sample (CRSM simulations only).
  const std::vector<SubsetMask>& first_sets() const { return first_sets_; }
  std::vector<SubsetMask>& first_sets() { return first_sets_; }
  /// Terms consumed per sample.
  const std::vector<std::uint32_t>& terms() const { return terms_; }
  std::vector<std::uint32_t>& terms() { return terms_; }

  bool operator==(const SampleBatch&) const = default;

 private:
  Carrier carrier_;
  std::size_t samples_;
  std::vector<double> values_;
  std::vector<SubsetMask> first_sets_;
  std::vector<std::uint32_t> terms_;
};

/// Spectral sup-measure Y given by a sampling procedure.
struct SpectralSampler {
  std::size_t dimension = 0;
  /// Writes one realisation of (Y(x))_x into `out`.
  std::function<void(PhiloxStream&, std::span<double> out)> draw;
  /// Almost sure bound on every Y(x); required in exact mode.
  std::optional<double> bound;
  /// Points where Y vanishes almost surely.
  SubsetMask structural_zeros;
  /// Points that are almost surely never in the argmax set of Y (used by
  /// `couple` for the lower CRSM). Unset: every non-structural point may be.
  std::optional<SubsetMask> never_argmax;

  /// Finite-support sampler; bound, structural zeros and never_argmax are
  /// computed from the atoms.
  static SpectralSampler from_atoms(std::vector<SpectralAtom> atoms);
  static SpectralSampler deterministic(PointFunction y);
};

/// Requires a completely alternating theta with theta(E) > 0.
SampleBatch simulate_crsm(const Capacity& theta, const SimConfig& cfg);
SampleBatch simulate_spectral(const SpectralSampler& sampler, const Carrier& carrier, const SimConfig& cfg);
/// Dispatches on the representation (Lebesgue goes through its additive capacity).
SampleBatch simulate(const TailDependenceFunctional& model, const SimConfig& cfg);

struct ScaleEstimate {
  double scale = 0.0;
  /// 3 scale / sqrt(N).
  double half_width = 0.0;
};

/// Maximum likelihood Frechet scale N / sum 1/z_j. Needs N >= 30 positive values.
ScaleEstimate frechet_scale_estimate(std::span<const double> z);

/// Points with x({pt}) >= (1 - rel_tol) x(E). Throws on an all-zero vector.
SubsetMask argmax_set(std::span<const double> x, double rel_tol = 0.0);

/// One line of a verification report.
struct CheckResult {
  std::string check;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ArgmaxIndependenceReport {
  std::size_t samples = 0;
  /// mean(T I) - mean(T) mean(I) with T = 1/X(E), I = 1{M hits K}.
  double difference = 0.0;
  double z = 0.0;
  bool pass = false;
  /// Same statistic with I' = 1{X(K) > median X(K)}; X(K) and X(E) are
  /// dependent, so this should be large.
  double control_z = 0.0;
  /// Samples whose argmax set equals the first LePage set.
  std::size_t argmax_matches_first_set = 0;
  /// Empirical P(M hits K) against theta(K) / theta(E).
  double hit_frequency = 0.0;
  double hit_probability = 0.0;
};

ArgmaxIndependenceReport argmax_independence_test(const Capacity& theta, const SimConfig& cfg, SubsetMask k);

struct CoupledBatch {
  SampleBatch lower;   // X_*
  SampleBatch middle;  // X
  SampleBatch upper;   // X^*
};

/// Builds X_* <= X <= X^* from shared (Gamma_i, Y_i) with
/// Y^*(x) = Y(E) 1{Y(x) > 0} and Y_*(x) = Y(E) 1{x in argmax Y}.
/// Requires a declared bound.
CoupledBatch couple(const SpectralSampler& sampler, const Carrier& carrier, const SimConfig& cfg);

struct ContinuityBoundReport {
  double exceedance = 0.0;  // empirical P(|X(K1) - X(K2)| > eps)
  double bound = 0.0;       // (2 theta(K1 u K2) - theta(K1) - theta(K2)) / eps
  double threshold = 0.0;   // bound + 4 sqrt(p(1-p)/N)
  bool pass = false;
};

ContinuityBoundReport continuity_bound_check(const Capacity& theta, SubsetMask k1, SubsetMask k2, double eps,
                                             const SimConfig& cfg);

struct DisjointIndependenceReport {
  bool additive = false;
  /// Largest |empirical joint CDF - product of marginals| over pairs and grid points.
  double max_deviation = 0.0;
  /// 4 binomial sigma at that grid point.
  double threshold_at_max = 0.0;
  /// Largest deviation / sigma.
  double max_z = 0.0;
  bool dependence_detected = false;
  bool pass = false;
};

/// For additive theta: checks factorisation of the joint CDF of X(P_i), X(P_j)
/// at 3 grid points per pair within 4 sigma. Otherwise passes iff some pair
/// shows a deviation beyond 4 sigma. Throws on overlapping parts.
DisjointIndependenceReport independence_on_disjoint(const Capacity& theta, std::span<const SubsetMask> parts,
                                                    const SimConfig& cfg);

/// Compares the Frechet scale of the extremal integral of f under `batch`
/// with eval(model, f): |scale - l(f)| <= 3 scale / sqrt(N).
CheckResult check_scale(const TailDependenceFunctional& model, const SampleBatch& batch, const PointFunction& f);

/// Empirical P(X(K_i) <= a_i for all i) against joint_cdf, within 4 binomial sigma.
CheckResult check_joint_cdf(const TailDependenceFunctional& model, const SampleBatch& batch,
                            std::span<const CdfPair> pairs);

}  // namespace crsm
