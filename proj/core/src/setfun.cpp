#include "crsm/setfun.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "crsm/errors.hpp"
#include "crsm/rng.hpp"

namespace crsm {

namespace {

std::atomic<double> g_tolerance{1e-9};

void require_table_size(const Carrier& c, std::size_t n, const char* what) {
  if (n != c.subset_count()) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(n) + " entries; expected 2^" +
                          std::to_string(c.size()) + " = " + std::to_string(c.subset_count()));
  }
}

// D_n(K) = D_{n-1}(K) - D_{n-1}(K cup K_n), D_0 = theta.
double nested_difference(const Capacity& theta, SubsetMask k, std::span<const SubsetMask> family) {
  if (family.empty()) return theta(k);
  const auto rest = family.first(family.size() - 1);
  return nested_difference(theta, k, rest) - nested_difference(theta, k | family.back(), rest);
}

}  // namespace

double set_function_tolerance() { return g_tolerance.load(std::memory_order_relaxed); }

void set_set_function_tolerance(double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw InvalidArgument("tolerance must be finite and nonnegative");
  g_tolerance.store(tol, std::memory_order_relaxed);
}

Capacity::Capacity(Carrier carrier, std::vector<double> table) : carrier_(std::move(carrier)), table_(std::move(table)) {
  require_table_size(carrier_, table_.size(), "capacity table");
  if (table_[0] != 0.0) throw InvalidArgument("capacity must vanish on the empty set");
  const double tol = set_function_tolerance();
  for (std::size_t m = 1; m < table_.size(); ++m) {
    if (!std::isfinite(table_[m])) throw InvalidArgument("capacity values must be finite");
    if (table_[m] < -tol) {
      throw InvalidArgument("capacity value on {" + carrier_.key_of(SubsetMask(m)) + "} is negative");
    }
  }
}

Capacity Capacity::tabulate(Carrier carrier, const std::function<double(SubsetMask)>& fn) {
  std::vector<double> table(carrier.subset_count());
  for (std::size_t m = 1; m < table.size(); ++m) table[m] = fn(SubsetMask(static_cast<SubsetMask::bits_type>(m)));
  return Capacity(std::move(carrier), std::move(table));
}

MobiusMeasure::MobiusMeasure(Carrier carrier, std::vector<double> weights)
    : carrier_(std::move(carrier)), weights_(std::move(weights)) {
  require_table_size(carrier_, weights_.size(), "Moebius weight table");
  if (weights_[0] != 0.0) throw InvalidArgument("Moebius weight on the empty set must be 0");
  for (double w : weights_)
    if (!std::isfinite(w)) throw InvalidArgument("Moebius weights must be finite");
}

double MobiusMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double successive_difference(const Capacity& theta, SubsetMask k, std::span<const SubsetMask> family) {
  const auto full = theta.carrier().full();
  if (!k.subset_of(full)) throw CarrierMismatch("base set is not a subset of the capacity's carrier");
  for (auto s : family)
    if (!s.subset_of(full)) throw CarrierMismatch("family set is not a subset of the capacity's carrier");
  if (family.empty()) throw InvalidArgument("successive difference needs at least one set");
  return nested_difference(theta, k, family);
}

MobiusMeasure mobius_inverse(const Capacity& theta) {
  const auto n = theta.carrier().subset_count();
  const auto full = n - 1;
  const auto table = theta.table();
  // g(A) = theta(E) - theta(E \ A) is the "hitting complement" form; its
  // Moebius transform over subsets is nu.
  std::vector<double> w(n);
  for (std::size_t a = 0; a < n; ++a) w[a] = table[full] - table[full & ~a];
  for (std::size_t bit = 1; bit < n; bit <<= 1) {
    for (std::size_t m = 0; m < n; ++m)
      if (m & bit) w[m] -= w[m ^ bit];
  }
  w[0] = 0.0;
  return MobiusMeasure(theta.carrier(), std::move(w));
}

Capacity capacity_from_measure(const MobiusMeasure& nu) {
  const auto n = nu.carrier().subset_count();
  const auto full = n - 1;
  // zeta[A] = sum_{F subset of A} nu(F); theta(K) = total - zeta[E \ K].
  std::vector<double> zeta(nu.weights().begin(), nu.weights().end());
  for (std::size_t bit = 1; bit < n; bit <<= 1) {
    for (std::size_t m = 0; m < n; ++m)
      if (m & bit) zeta[m] += zeta[m ^ bit];
  }
  const double total = zeta[full];
  std::vector<double> table(n);
  for (std::size_t k = 1; k < n; ++k) table[k] = total - zeta[full & ~k];
  return Capacity(nu.carrier(), std::move(table));
}

Classification classify(const Capacity& theta) {
  const double tol = set_function_tolerance();
  const auto d = theta.dimension();
  const auto n = theta.carrier().subset_count();
  const auto table = theta.table();
  Classification c;

  c.monotone = true;
  for (std::size_t m = 0; m < n && c.monotone; ++m) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto bit = std::size_t{1} << i;
      if (!(m & bit) && table[m] > table[m | bit] + tol) {
        c.monotone = false;
        break;
      }
    }
  }

  // Maxitive on all pairs <=> theta(K) = max of its singleton values for every K.
  c.maxitive = true;
  for (std::size_t m = 1; m < n; ++m) {
    double mx = 0.0;
    for (auto i : SubsetMask(static_cast<SubsetMask::bits_type>(m)).indices())
      mx = std::max(mx, table[std::size_t{1} << i]);
    if (std::abs(table[m] - mx) > tol) {
      c.maxitive = false;
      break;
    }
  }

  const auto nu = mobius_inverse(theta);
  c.min_weight = std::numeric_limits<double>::infinity();
  c.additive = true;
  for (std::size_t m = 1; m < n; ++m) {
    const double w = nu.weights()[m];
    if (w < c.min_weight) {
      c.min_weight = w;
      c.min_witness = SubsetMask(static_cast<SubsetMask::bits_type>(m));
    }
    if (std::popcount(m) >= 2 && std::abs(w) > tol) c.additive = false;
  }
  c.completely_alternating = c.min_weight >= -tol;
  return c;
}

AlternationReport check_complete_alternation_direct(const Capacity& theta, int max_order, std::uint64_t seed) {
  if (max_order < 1) throw InvalidArgument("max_order must be at least 1");
  const double tol = set_function_tolerance();
  const auto d = theta.dimension();
  const auto n_subsets = theta.carrier().subset_count();
  AlternationReport report;
  report.max_value = -std::numeric_limits<double>::infinity();

  auto record = [&](SubsetMask k, std::span<const SubsetMask> family) {
    const double v = nested_difference(theta, k, family);
    ++report.families_checked;
    if (v > report.max_value) {
      report.max_value = v;
      report.base = k;
      report.family.assign(family.begin(), family.end());
    }
  };

  if (d <= 3) {
    // Successive differences are symmetric in the family and a repeated set
    // adds nothing (Delta_L Delta_L = Delta_L), so families of distinct
    // nonempty sets of size <= min(max_order, 2^d - 1) exhaust all values.
    report.exhaustive = true;
    const auto nonempty = static_cast<std::uint32_t>(n_subsets - 1);
    const int max_n = std::min<int>(max_order, static_cast<int>(nonempty));
    std::vector<SubsetMask> family;
    for (std::uint32_t choice = 1; choice < (1U << nonempty); ++choice) {
      if (std::popcount(choice) > max_n) continue;
      family.clear();
      for (std::uint32_t j = 0; j < nonempty; ++j)
        if (choice & (1U << j)) family.emplace_back(j + 1);
      for (std::size_t k = 0; k < n_subsets; ++k) record(SubsetMask(static_cast<SubsetMask::bits_type>(k)), family);
    }
  } else {
    PhiloxStream rng(seed, 0);
    std::vector<SubsetMask> family;
    auto draw_nonempty = [&] { return SubsetMask(static_cast<SubsetMask::bits_type>(1 + rng.below(n_subsets - 1))); };
    for (int t = 0; t < 10000; ++t) {
      const auto order = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_order)));
      const auto k = draw_nonempty();
      family.clear();
      for (int i = 0; i < order; ++i) family.push_back(draw_nonempty());
      record(k, family);
    }
  }
  report.violation = report.max_value > tol;
  return report;
}

}  // namespace crsm
