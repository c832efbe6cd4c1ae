#include "crsm/transforms.hpp"

#include <cmath>

#include "crsm/errors.hpp"

namespace crsm {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

void require_probability_vector(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument(std::string(what) + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw InvalidArgument(std::string(what) + " sums to " + std::to_string(total) + ", not 1");
}

void require_positive(double c, const char* what) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int wrap(int v, int n) { return ((v % n) + n) % n; }

}  // namespace

BernsteinFunction::BernsteinFunction(double drift, std::vector<Jump> jumps) : drift_(drift), jumps_(std::move(jumps)) {
  if (!(drift_ >= 0.0) || !std::isfinite(drift_)) throw InvalidArgument("Bernstein drift must be nonnegative");
  for (const auto& j : jumps_) {
    if (!(j.rate > 0.0) || !(j.weight > 0.0) || !std::isfinite(j.rate) || !std::isfinite(j.weight))
      throw InvalidArgument("Bernstein jump atoms need positive rate and weight");
  }
}

BernsteinFunction BernsteinFunction::power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("power Bernstein function needs alpha in (0, 1]");
  BernsteinFunction g(0.0, {});
  g.alpha_ = alpha;
  return g;
}

double BernsteinFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("Bernstein functions are evaluated on t >= 0");
  if (alpha_) return std::pow(t, *alpha_);
  double v = drift_ * t;
  for (const auto& j : jumps_) v += j.weight * -std::expm1(-j.rate * t);
  return v;
}

Capacity compose_capacity(const BernsteinFunction& g, const Capacity& theta) {
  std::vector<double> table(theta.table().begin(), theta.table().end());
  for (std::size_t m = 1; m < table.size(); ++m) table[m] = g(std::max(0.0, table[m]));
  table[0] = 0.0;
  return Capacity(theta.carrier(), std::move(table));
}

Capacity exchangeable_capacity(const Carrier& carrier, std::span<const MixingAtom> zeta, double c) {
  require_positive(c, "exchangeable capacity scale");
  if (zeta.empty()) throw InvalidArgument("mixing distribution needs at least one atom");
  std::vector<double> probs;
  for (const auto& a : zeta) {
    if (!(a.value >= 0.0 && a.value <= 1.0)) throw InvalidArgument("mixing atoms must lie in [0, 1]");
    probs.push_back(a.probability);
  }
  require_probability_vector(probs, "mixing distribution");
  const auto d = static_cast<int>(carrier.size());
  std::vector<double> by_size(d + 1, 0.0);
  for (int m = 1; m <= d; ++m) {
    double e = 0.0;
    for (const auto& a : zeta) e += a.probability * std::pow(1.0 - a.value, m);
    by_size[m] = c * (1.0 - e);
  }
  return Capacity::tabulate(carrier, [&](SubsetMask k) { return std::max(0.0, by_size[k.size()]); });
}

Capacity subset_size_capacity(const Carrier& carrier, std::span<const double> p, double c) {
  require_positive(c, "subset-size capacity scale");
  const auto d = static_cast<int>(carrier.size());
  if (p.size() != static_cast<std::size_t>(d) + 1)
    throw InvalidArgument("subset-size distribution needs d + 1 = " + std::to_string(d + 1) + " probabilities");
  require_probability_vector(p, "subset-size distribution");
  std::vector<double> by_size(d + 1, 0.0);
  for (int m = 1; m <= d; ++m) {
    double miss = p[0];
    for (int k = 1; k <= d - m; ++k) miss += binomial(d - m, k) / binomial(d, k) * p[k];
    by_size[m] = c * (1.0 - miss);
  }
  return Capacity::tabulate(carrier, [&](SubsetMask k) { return std::max(0.0, by_size[k.size()]); });
}

double Distortion::operator()(double t) const {
  switch (kind) {
    case Kind::power:
      return std::pow(t, alpha);
    case Kind::avar:
      return std::min(t, alpha) / alpha;
  }
  return 0.0;
}

Capacity distortion_capacity(const Carrier& carrier, std::span<const double> mu, Distortion g) {
  if (!(g.alpha > 0.0 && g.alpha <= 1.0)) throw InvalidArgument("distortion parameter alpha must lie in (0, 1]");
  return distortion_capacity(carrier, mu, [g](double t) { return g(t); });
}

Capacity distortion_capacity(const Carrier& carrier, std::span<const double> mu,
                             const std::function<double(double)>& g) {
  if (mu.size() != carrier.size()) throw CarrierMismatch("reference measure does not match the carrier");
  for (double w : mu)
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("reference measure weights must be nonnegative");
  return Capacity::tabulate(carrier, [&](SubsetMask k) {
    double m = 0.0;
    for (auto i : k.indices()) m += mu[i];
    return g(m);
  });
}

SubsetMask torus_shift(const TorusShape& torus, SubsetMask k, std::span<const int> offset) {
  if (offset.size() != static_cast<std::size_t>(torus.dims)) throw InvalidArgument("shift has the wrong dimension");
  const int n = torus.side;
  SubsetMask out;
  for (auto idx : k.indices()) {
    const int i = static_cast<int>(idx);
    if (torus.dims == 1) {
      out = out.with(static_cast<std::size_t>(wrap(i + offset[0], n)));
    } else {
      const int r = wrap(i / n + offset[0], n), c = wrap(i % n + offset[1], n);
      out = out.with(static_cast<std::size_t>(r * n + c));
    }
  }
  return out;
}

Capacity torus_storm_capacity(int side, int dims, std::span<const StormShape> shape, double scale) {
  require_positive(scale, "torus normalisation constant");
  const auto carrier = Carrier::torus(side, dims);
  const auto torus = *carrier.torus_shape();
  if (shape.empty()) throw InvalidArgument("storm shape distribution needs at least one atom");
  std::vector<double> probs;
  // Reflected shapes as offset lists.
  std::vector<std::vector<std::vector<int>>> reflected;
  for (const auto& s : shape) {
    if (s.cells.empty()) throw InvalidArgument("storm shapes must be nonempty");
    probs.push_back(s.probability);
    auto& r = reflected.emplace_back();
    for (const auto& cell : s.cells) {
      if (cell.size() != static_cast<std::size_t>(dims)) throw InvalidArgument("storm cell has the wrong dimension");
      std::vector<int> neg(cell.size());
      for (std::size_t a = 0; a < cell.size(); ++a) neg[a] = -cell[a];
      r.push_back(std::move(neg));
    }
  }
  require_probability_vector(probs, "storm shape distribution");

  return Capacity::tabulate(carrier, [&](SubsetMask k) {
    double expected = 0.0;
    for (std::size_t s = 0; s < reflected.size(); ++s) {
      SubsetMask sum;
      for (const auto& off : reflected[s]) sum |= torus_shift(torus, k, off);
      expected += probs[s] * sum.size();
    }
    return scale * expected;
  });
}

bool check_stationary(const Capacity& theta) {
  const auto& shape = theta.carrier().torus_shape();
  if (!shape) throw InvalidArgument("stationarity needs a carrier with torus structure");
  const int n = shape->side;
  std::vector<std::vector<int>> shifts;
  if (shape->dims == 1) {
    for (int v = 0; v < n; ++v) shifts.push_back({v});
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) shifts.push_back({a, b});
  }
  const auto count = theta.carrier().subset_count();
  for (std::size_t m = 1; m < count; ++m) {
    const SubsetMask k(static_cast<SubsetMask::bits_type>(m));
    for (const auto& v : shifts)
      if (theta(torus_shift(*shape, k, v)) != theta(k)) return false;
  }
  return true;
}

}  // namespace crsm
