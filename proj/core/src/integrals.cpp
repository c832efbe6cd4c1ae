#include "crsm/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crsm/errors.hpp"
#include "crsm/rng.hpp"

namespace crsm {

namespace {

void require_same_carrier(const PointFunction& f, const Capacity& theta) {
  if (f.size() != theta.dimension()) {
    throw CarrierMismatch("point function has " + std::to_string(f.size()) + " values but the capacity lives on " +
                          std::to_string(theta.dimension()) + " points");
  }
}

// Visits the upper level sets {f >= v} for the distinct values v of f in
// decreasing order: visit(v, next_lower_value_or_0, level_set).
template <class Visit>
void for_each_level(const PointFunction& f, Visit&& visit) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] > f[b]; });
  SubsetMask level;
  for (std::size_t i = 0; i < order.size();) {
    const double v = f[order[i]];
    while (i < order.size() && f[order[i]] == v) level = level.with(order[i++]);
    if (v <= 0.0) break;
    const double next = i < order.size() ? f[order[i]] : 0.0;
    visit(v, next, level);
  }
}

// Random nondecreasing map t -> drift t + sum_k w_k 1{t >= c_k} on [0, 1].
struct StepTransform {
  double drift = 0.0;
  std::vector<std::pair<double, double>> steps;

  static StepTransform draw(PhiloxStream& rng) {
    StepTransform h;
    h.drift = rng.bernoulli(0.5) ? rng.uniform(0.0, 3.0) : 0.0;
    const auto n_steps = rng.below(4);
    for (std::uint64_t k = 0; k < n_steps; ++k) h.steps.emplace_back(rng.uniform(), rng.uniform(0.0, 2.0));
    return h;
  }

  double operator()(double t) const {
    double v = drift * t;
    for (auto [c, w] : steps)
      if (t >= c) v += w;
    return v;
  }
};

}  // namespace

double choquet_integral(const PointFunction& f, const Capacity& theta) {
  require_same_carrier(f, theta);
  // Terms are accumulated from the lowest level up, the same order as
  // comonotone_formula, so both routes agree bit for bit.
  std::vector<double> terms;
  terms.reserve(f.size());
  for_each_level(f, [&](double v, double next, SubsetMask level) { terms.push_back((v - next) * theta(level)); });
  double sum = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
  return sum;
}

double extremal_integral(const PointFunction& f, const Capacity& theta) {
  require_same_carrier(f, theta);
  double best = 0.0;
  for_each_level(f, [&](double v, double, SubsetMask level) { best = std::max(best, v * theta(level)); });
  return best;
}

double extremal_integral_subset_form(const PointFunction& f, const Capacity& theta) {
  require_same_carrier(f, theta);
  double best = 0.0;
  const auto n = theta.carrier().subset_count();
  for (std::size_t m = 1; m < n; ++m) {
    const SubsetMask k(static_cast<SubsetMask::bits_type>(m));
    double lo = std::numeric_limits<double>::infinity();
    for (auto i : k.indices()) lo = std::min(lo, f[i]);
    best = std::max(best, theta(k) * lo);
  }
  return best;
}

bool comonotonic(const PointFunction& f, const PointFunction& g) {
  if (f.size() != g.size()) throw CarrierMismatch("point functions have different carriers");
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = x + 1; y < f.size(); ++y)
      if ((f[x] - f[y]) * (g[x] - g[y]) < 0.0) return false;
  return true;
}

double comonotone_formula(const PointFunction& u, const Capacity& theta) {
  require_same_carrier(u, theta);
  const auto d = u.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return u[a] < u[b]; });
  // Set of points at ranks k..d (the d-k+1 largest values), built from the top.
  std::vector<SubsetMask> upper(d + 1);
  for (std::size_t k = d; k-- > 0;) upper[k] = upper[k + 1].with(order[k]);
  double sum = u[order[0]] * theta(upper[0]);
  for (std::size_t k = 1; k < d; ++k) sum += (u[order[k]] - u[order[k - 1]]) * theta(upper[k]);
  return sum;
}

ComonotoneAdditivityReport comonotone_additivity_check(const Functional& ell, std::size_t dimension, int trials,
                                                       std::uint64_t seed, double tolerance) {
  if (trials < 1) throw InvalidArgument("comonotone additivity check needs at least one trial");
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  ComonotoneAdditivityReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    PhiloxStream rng(seed, static_cast<std::uint64_t>(t));
    // Shared vector on a coarse grid so that ties between points occur.
    std::vector<double> z(dimension);
    for (auto& v : z) v = static_cast<double>(rng.below(9)) / 8.0;
    const auto h1 = StepTransform::draw(rng);
    const auto h2 = StepTransform::draw(rng);
    std::vector<double> fv(dimension), gv(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
      fv[i] = h1(z[i]);
      gv[i] = h2(z[i]);
    }
    PointFunction f(std::move(fv)), g(std::move(gv));
    const double dev = std::abs(ell(f + g) - ell(f) - ell(g));
    if (dev > report.max_deviation) {
      report.max_deviation = dev;
      if (dev > tolerance) report.witness.emplace(f, g);
    }
  }
  return report;
}

}  // namespace crsm
