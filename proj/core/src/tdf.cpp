#include "crsm/tdf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crsm/errors.hpp"

namespace crsm {

namespace {

constexpr double kProbabilityTolerance = 1e-9;
constexpr double kDominationTolerance = 1e-9;

void require_dimension(const TailDependenceFunctional& ell, std::size_t n) {
  if (n != ell.dimension()) {
    throw CarrierMismatch("point function has " + std::to_string(n) + " values but the functional lives on " +
                          std::to_string(ell.dimension()) + " points");
  }
}

void require_same_carrier(const PointFunction& f, const Capacity& theta) {
  if (f.size() != theta.dimension()) throw CarrierMismatch("point function and capacity have different carriers");
}

// Feasibility mu(K) <= theta(K) + tol for every K (mu >= 0 checked by the caller).
bool measure_feasible(const Capacity& theta, std::span<const double> mu, double tol) {
  const auto n = theta.carrier().subset_count();
  // Subset sums by lowest set bit recursion.
  std::vector<double> sums(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) {
    const auto low = static_cast<std::size_t>(std::countr_zero(m));
    sums[m] = sums[m & (m - 1)] + mu[low];
    if (sums[m] > theta.table()[m] + tol) return false;
  }
  return true;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_)
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("measure weights must be finite and nonnegative");
}

double DiscreteMeasure::operator()(SubsetMask k) const {
  double s = 0.0;
  for (auto i : k.indices()) s += weights_.at(i);
  return s;
}

TailDependenceFunctional TailDependenceFunctional::choquet(Capacity theta) {
  return TailDependenceFunctional(ChoquetForm{std::move(theta)});
}

TailDependenceFunctional TailDependenceFunctional::spectral(Carrier carrier, std::vector<SpectralAtom> atoms) {
  if (atoms.empty()) throw InvalidArgument("spectral functional needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.probability > 0.0) || !std::isfinite(a.probability))
      throw InvalidArgument("spectral atom probabilities must be positive");
    if (a.values.size() != carrier.size()) throw CarrierMismatch("spectral atom does not match the carrier");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw InvalidArgument("spectral atom probabilities sum to " + std::to_string(total) + ", not 1");
  }
  return TailDependenceFunctional(SpectralForm{std::move(carrier), std::move(atoms)});
}

TailDependenceFunctional TailDependenceFunctional::lebesgue(Carrier carrier, DiscreteMeasure mu) {
  if (mu.size() != carrier.size()) throw CarrierMismatch("measure does not match the carrier");
  return TailDependenceFunctional(LebesgueForm{std::move(carrier), std::move(mu)});
}

const Carrier& TailDependenceFunctional::carrier() const {
  return std::visit(
      [](const auto& form) -> const Carrier& {
        if constexpr (std::is_same_v<std::decay_t<decltype(form)>, ChoquetForm>)
          return form.theta.carrier();
        else
          return form.carrier;
      },
      rep_);
}

Functional TailDependenceFunctional::as_functional() const {
  return [self = *this](const PointFunction& f) { return eval(self, f); };
}

std::string to_string(TailDependenceFunctional::Kind kind) {
  switch (kind) {
    case TailDependenceFunctional::Kind::choquet:
      return "choquet";
    case TailDependenceFunctional::Kind::spectral:
      return "spectral";
    case TailDependenceFunctional::Kind::lebesgue:
      return "lebesgue";
  }
  return "unknown";
}

double eval(const TailDependenceFunctional& ell, const PointFunction& f) {
  require_dimension(ell, f.size());
  if (const auto* c = ell.as_choquet()) return choquet_integral(f, c->theta);
  if (const auto* s = ell.as_spectral()) {
    double sum = 0.0;
    for (const auto& atom : s->atoms) {
      double mx = 0.0;
      for (std::size_t x = 0; x < f.size(); ++x) mx = std::max(mx, f[x] * atom.values[x]);
      sum += atom.probability * mx;
    }
    return sum;
  }
  const auto& mu = ell.as_lebesgue()->mu;
  double sum = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) sum += f[x] * mu[x];
  return sum;
}

Capacity extremal_coefficients(const TailDependenceFunctional& ell) {
  if (const auto* c = ell.as_choquet()) return c->theta;
  const auto d = ell.dimension();
  return Capacity::tabulate(ell.carrier(), [&](SubsetMask k) { return eval(ell, PointFunction::indicator(d, k)); });
}

MaxAlternationReport check_max_complete_alternation(const Functional& ell, std::size_t dimension, int order,
                                                    int trials, std::uint64_t seed, double tolerance) {
  if (order < 1 || order > 5) throw InvalidArgument("max-alternation order must be in 1..5");
  if (trials < 1) throw InvalidArgument("max-alternation check needs at least one trial");
  MaxAlternationReport report;
  report.order = order;
  report.trials = trials;
  report.max_value = -std::numeric_limits<double>::infinity();

  auto draw = [&](PhiloxStream& rng) {
    std::vector<double> v(dimension);
    for (auto& x : v) x = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.0, 2.0);
    return PointFunction(std::move(v));
  };

  std::vector<PointFunction> us;
  for (int t = 0; t < trials; ++t) {
    PhiloxStream rng(seed, static_cast<std::uint64_t>(t));
    us.clear();
    for (int i = 0; i <= order; ++i) us.push_back(draw(rng));
    double value = 0.0;
    for (std::uint32_t s = 0; s < (1U << order); ++s) {
      PointFunction arg = us[0];
      for (int i = 0; i < order; ++i)
        if (s & (1U << i)) arg = arg.max_with(us[i + 1]);
      value += (std::popcount(s) % 2 == 0 ? 1.0 : -1.0) * ell(arg);
    }
    if (value > report.max_value) {
      report.max_value = value;
      report.witness = us;
    }
  }
  report.violation = report.max_value > tolerance;
  return report;
}

TailDependenceFunctional crsm_envelope(const TailDependenceFunctional& ell) {
  return TailDependenceFunctional::choquet(extremal_coefficients(ell));
}

GreedyDual dual_greedy(const Capacity& theta, const PointFunction& f) {
  require_same_carrier(f, theta);
  const auto cls = classify(theta);
  if (!cls.completely_alternating) {
    throw NotCompletelyAlternating("greedy dual requires a completely alternating capacity; Moebius weight " +
                                   std::to_string(cls.min_weight) + " on {" +
                                   theta.carrier().key_of(cls.min_witness) + "}");
  }
  const auto d = f.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] > f[b]; });

  std::vector<double> mu(d, 0.0);
  SubsetMask prefix;
  double value = 0.0;
  for (auto x : order) {
    const auto next = prefix.with(x);
    // Monotone up to tolerance; clip rounding noise.
    mu[x] = std::max(0.0, theta(next) - theta(prefix));
    value += f[x] * mu[x];
    prefix = next;
  }
  if (!measure_feasible(theta, mu, set_function_tolerance())) {
    throw Error("internal error: greedy measure violates mu(K) <= theta(K) for a capacity classified as "
                "completely alternating");
  }
  return {DiscreteMeasure(std::move(mu)), value};
}

double dual_oracle_exact(const Capacity& theta, const PointFunction& f) {
  require_same_carrier(f, theta);
  const auto d = theta.dimension();
  if (d > 3) throw SizeCapError("exact dual oracle enumerates vertices only for d <= 3");

  // Constraint rows a.mu <= b: one per nonempty subset, then -mu_x <= 0.
  const auto n_subsets = theta.carrier().subset_count();
  std::vector<std::pair<std::vector<double>, double>> rows;
  for (std::size_t m = 1; m < n_subsets; ++m) {
    std::vector<double> a(d, 0.0);
    for (std::size_t x = 0; x < d; ++x)
      if (m & (std::size_t{1} << x)) a[x] = 1.0;
    rows.emplace_back(std::move(a), theta.table()[m]);
  }
  for (std::size_t x = 0; x < d; ++x) {
    std::vector<double> a(d, 0.0);
    a[x] = 1.0;
    rows.emplace_back(std::move(a), 0.0);
  }

  const double tol = set_function_tolerance();
  double best = -std::numeric_limits<double>::infinity();
  const auto r = rows.size();
  // Every d-subset of constraint rows taken as tight.
  std::vector<bool> pick(r, false);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(d), pick.end(), true);
  do {
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b(d);
    std::size_t row = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (!pick[i]) continue;
      for (std::size_t x = 0; x < d; ++x) a(row, x) = rows[i].first[x];
      b(row) = rows[i].second;
      ++row;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < static_cast<Eigen::Index>(d)) continue;
    const Eigen::VectorXd mu = lu.solve(b);
    if ((mu.array() < -tol).any()) continue;
    std::vector<double> mv(mu.data(), mu.data() + d);
    if (!measure_feasible(theta, mv, tol)) continue;
    double value = 0.0;
    for (std::size_t x = 0; x < d; ++x) value += f[x] * mv[x];
    best = std::max(best, value);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

double dual_oracle_sampled(const Capacity& theta, const PointFunction& f, int draws, std::uint64_t seed) {
  require_same_carrier(f, theta);
  if (draws < 1) throw InvalidArgument("sampled dual oracle needs at least one draw");
  const auto d = theta.dimension();
  PhiloxStream rng(seed, 0);
  double best = 0.0;  // mu = 0 is always feasible
  std::vector<double> mu(d);
  for (int t = 0; t < draws; ++t) {
    for (std::size_t x = 0; x < d; ++x) mu[x] = rng.uniform() * theta(SubsetMask::singleton(x));
    if (!measure_feasible(theta, mu, 0.0)) continue;
    double value = 0.0;
    for (std::size_t x = 0; x < d; ++x) value += f[x] * mu[x];
    best = std::max(best, value);
  }
  return best;
}

PointFunction random_test_function(std::size_t dimension, PhiloxStream& rng) {
  std::vector<double> v(dimension);
  const double scale = std::exp(rng.uniform(-3.0, 3.0));
  for (auto& x : v) {
    const double r = rng.uniform();
    if (r < 0.15)
      x = 0.0;
    else if (r < 0.3)
      x = scale;  // repeated values exercise ties
    else
      x = scale * std::exp(rng.uniform(-2.0, 2.0));
  }
  return PointFunction(std::move(v));
}

DominationReport dominates(const TailDependenceFunctional& l1, const TailDependenceFunctional& l2, int trials,
                           std::uint64_t seed) {
  if (l1.dimension() != l2.dimension()) throw CarrierMismatch("functionals live on different carriers");
  if (trials < 1) throw InvalidArgument("domination check needs at least one trial");
  DominationReport report;
  report.trials = trials;
  report.min_difference = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    PhiloxStream rng(seed, static_cast<std::uint64_t>(t));
    auto f = random_test_function(l1.dimension(), rng);
    const double diff = eval(l1, f) - eval(l2, f);
    if (diff < report.min_difference) {
      report.min_difference = diff;
      report.argmin = std::move(f);
    }
  }
  report.dominates = report.min_difference >= -kDominationTolerance;
  return report;
}

double joint_cdf(const TailDependenceFunctional& model, std::span<const CdfPair> pairs) {
  const auto full = model.carrier().full();
  for (const auto& p : pairs) {
    if (!(p.level > 0.0)) throw InvalidArgument("joint CDF levels must be positive");
    if (!p.set.subset_of(full)) throw CarrierMismatch("joint CDF set is not a subset of the carrier");
  }
  double exponent = 0.0;
  if (const auto* c = model.as_choquet()) {
    const auto nu = mobius_inverse(c->theta);
    const auto n = c->theta.carrier().subset_count();
    for (std::size_t m = 1; m < n; ++m) {
      const SubsetMask f(static_cast<SubsetMask::bits_type>(m));
      double worst = 0.0;
      for (const auto& p : pairs)
        if (f.intersects(p.set)) worst = std::max(worst, 1.0 / p.level);
      exponent += nu(f) * worst;
    }
  } else if (const auto* s = model.as_spectral()) {
    for (const auto& atom : s->atoms) {
      double worst = 0.0;
      for (const auto& p : pairs) worst = std::max(worst, sup_integral(atom.values, p.set) / p.level);
      exponent += atom.probability * worst;
    }
  } else {
    const auto& mu = model.as_lebesgue()->mu;
    for (std::size_t x = 0; x < mu.size(); ++x) {
      double worst = 0.0;
      for (const auto& p : pairs)
        if (p.set.contains(x)) worst = std::max(worst, 1.0 / p.level);
      exponent += mu[x] * worst;
    }
  }
  return std::exp(-exponent);
}

}  // namespace crsm
