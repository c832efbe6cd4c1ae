#include "crsm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "crsm/alias.hpp"
#include "crsm/errors.hpp"

namespace crsm {

namespace {

constexpr double kEstimateSigmas = 3.0;
constexpr double kTestSigmas = 4.0;

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned t = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, work)));
}

// Runs body(j) for j in [0, n) over contiguous chunks. The exception of the
// lowest-indexed failing chunk is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  const unsigned t = resolve_threads(threads, n);
  if (t == 1) {
    for (std::size_t j = 0; j < n; ++j) body(j);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / t, hi = n * (w + 1) / t;
      try {
        for (std::size_t j = lo; j < hi; ++j) body(j);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

bool all_covered(std::span<const double> x, SubsetMask relevant, double level) {
  for (auto b = relevant.bits(); b != 0; b &= b - 1)
    if (!(x[std::countr_zero(b)] > level)) return false;
  return true;
}

[[noreturn]] void throw_max_terms(std::size_t j, std::size_t max_terms) {
  throw MaxTermsExceeded("sample " + std::to_string(j) + " did not reach the exact stopping condition within " +
                         std::to_string(max_terms) + " LePage terms; sample discarded");
}

double binomial_sigma(double p, std::size_t n) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n)); }

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// |mean(T I) - mean(T) mean(I)| standardised by sd(T) sd(I) / sqrt(N).
std::pair<double, double> covariance_z(std::span<const double> t, std::span<const double> ind) {
  const double mt = mean(t), mi = mean(ind);
  double cov = 0.0, vt = 0.0, vi = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    cov += t[j] * ind[j];
    vt += (t[j] - mt) * (t[j] - mt);
    vi += (ind[j] - mi) * (ind[j] - mi);
  }
  const double n = static_cast<double>(t.size());
  const double diff = cov / n - mt * mi;
  const double se = std::sqrt(vt / n) * std::sqrt(vi / n) / std::sqrt(n);
  return {diff, se > 0.0 ? diff / se : 0.0};
}

}  // namespace

void SimConfig::validate() const {
  if (samples < 1) throw InvalidArgument("number of samples must be at least 1");
  if (mode == SimMode::truncated && truncation_terms < 1) throw InvalidArgument("truncation needs at least one term");
  if (max_terms < 1) throw InvalidArgument("max_terms must be at least 1");
}

SimConfig with_mode(SimConfig cfg, const std::string& mode) {
  if (mode == "exact") {
    cfg.mode = SimMode::exact;
    return cfg;
  }
  const std::string prefix = "truncated:";
  if (mode.rfind(prefix, 0) == 0) {
    const auto digits = mode.substr(prefix.size());
    std::size_t used = 0;
    unsigned long long k = 0;
    try {
      k = std::stoull(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != digits.size() || k < 1) throw InvalidArgument("bad truncation in mode '" + mode + "'");
    cfg.mode = SimMode::truncated;
    cfg.truncation_terms = static_cast<std::size_t>(k);
    return cfg;
  }
  throw InvalidArgument("mode must be 'exact' or 'truncated:K', got '" + mode + "'");
}

SampleBatch::SampleBatch(Carrier carrier, std::size_t samples)
    : carrier_(std::move(carrier)), samples_(samples), values_(samples * carrier_.size(), 0.0), terms_(samples, 0) {}

SupMeasureVector SampleBatch::realisation(std::size_t j) const {
  const auto r = row(j);
  return SupMeasureVector(std::vector<double>(r.begin(), r.end()));
}

std::vector<double> SampleBatch::values_on(SubsetMask k) const {
  std::vector<double> out(samples_);
  for (std::size_t j = 0; j < samples_; ++j) out[j] = sup_integral(row(j), k);
  return out;
}

std::vector<double> SampleBatch::extremal_integrals(const PointFunction& f) const {
  if (f.size() != dimension()) throw CarrierMismatch("point function does not match the sample carrier");
  std::vector<double> out(samples_);
  for (std::size_t j = 0; j < samples_; ++j) {
    const auto r = row(j);
    double m = 0.0;
    for (std::size_t x = 0; x < r.size(); ++x) m = std::max(m, f[x] * r[x]);
    out[j] = m;
  }
  return out;
}

SpectralSampler SpectralSampler::from_atoms(std::vector<SpectralAtom> atoms) {
  if (atoms.empty()) throw InvalidArgument("spectral sampler needs at least one atom");
  const auto d = atoms.front().values.size();
  std::vector<double> probs;
  double bound = 0.0;
  SubsetMask nonzero, argmax_reach;
  for (const auto& a : atoms) {
    if (a.values.size() != d) throw CarrierMismatch("spectral atoms have different dimensions");
    probs.push_back(a.probability);
    double top = 0.0;
    for (std::size_t x = 0; x < d; ++x) {
      top = std::max(top, a.values[x]);
      if (a.values[x] > 0.0) nonzero = nonzero.with(x);
    }
    bound = std::max(bound, top);
    if (top > 0.0)
      for (std::size_t x = 0; x < d; ++x)
        if (a.values[x] == top) argmax_reach = argmax_reach.with(x);
  }
  SpectralSampler s;
  s.dimension = d;
  s.bound = bound;
  s.structural_zeros = SubsetMask::full(d).minus(nonzero);
  s.never_argmax = SubsetMask::full(d).minus(argmax_reach);
  s.draw = [table = AliasTable(probs), atoms = std::move(atoms)](PhiloxStream& rng, std::span<double> out) {
    const auto& v = atoms[table.draw(rng)].values;
    std::copy(v.values().begin(), v.values().end(), out.begin());
  };
  return s;
}

SpectralSampler SpectralSampler::deterministic(PointFunction y) {
  std::vector<SpectralAtom> atoms;
  atoms.push_back({1.0, std::move(y)});
  return from_atoms(std::move(atoms));
}

SampleBatch simulate_crsm(const Capacity& theta, const SimConfig& cfg) {
  cfg.validate();
  const auto cls = classify(theta);
  if (!cls.completely_alternating) {
    throw NotCompletelyAlternating("CRSM simulation needs a completely alternating capacity; Moebius weight " +
                                   std::to_string(cls.min_weight) + " on {" +
                                   theta.carrier().key_of(cls.min_witness) + "}");
  }
  const double total = theta.total();
  if (!(total > 0.0)) throw InvalidArgument("CRSM simulation needs theta(E) > 0");

  const auto nu = mobius_inverse(theta);
  std::vector<double> weights(nu.weights().begin(), nu.weights().end());
  SubsetMask relevant;
  for (std::size_t m = 1; m < weights.size(); ++m) {
    weights[m] = std::max(0.0, weights[m]);
    if (weights[m] > 0.0) relevant |= SubsetMask(static_cast<SubsetMask::bits_type>(m));
  }
  const AliasTable sets(weights);

  SampleBatch batch(theta.carrier(), cfg.samples);
  batch.first_sets().assign(cfg.samples, SubsetMask{});
  const bool exact = cfg.mode == SimMode::exact;
  const std::size_t limit = exact ? cfg.max_terms : cfg.truncation_terms;

  parallel_for(cfg.samples, cfg.threads, [&](std::size_t j) {
    PhiloxStream rng(cfg.seed, j);
    auto x = batch.row(j);
    double gamma = 0.0;
    std::size_t n = 0;
    while (true) {
      gamma += rng.exponential();
      const double value = total / gamma;
      // Every covered point holds a value from an earlier term, hence > value.
      if (exact && all_covered(x, relevant, value)) break;
      if (n == limit) {
        if (exact) throw_max_terms(j, limit);
        break;
      }
      const SubsetMask f(static_cast<SubsetMask::bits_type>(sets.draw(rng)));
      if (n == 0) batch.first_sets()[j] = f;
      for (auto b = f.bits(); b != 0; b &= b - 1) {
        auto& v = x[std::countr_zero(b)];
        v = std::max(v, value);
      }
      ++n;
    }
    batch.terms()[j] = static_cast<std::uint32_t>(n);
  });
  return batch;
}

SampleBatch simulate_spectral(const SpectralSampler& sampler, const Carrier& carrier, const SimConfig& cfg) {
  cfg.validate();
  if (sampler.dimension != carrier.size()) throw CarrierMismatch("sampler dimension does not match the carrier");
  const bool exact = cfg.mode == SimMode::exact;
  if (exact && !sampler.bound) throw InvalidArgument("exact spectral simulation requires a declared bound on Y");
  const double bound = sampler.bound.value_or(0.0);
  const auto relevant = carrier.full().minus(sampler.structural_zeros);
  const std::size_t limit = exact ? cfg.max_terms : cfg.truncation_terms;
  const auto d = carrier.size();

  SampleBatch batch(carrier, cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t j) {
    PhiloxStream rng(cfg.seed, j);
    auto x = batch.row(j);
    std::vector<double> y(d);
    double gamma = 0.0;
    std::size_t n = 0;
    while (true) {
      gamma += rng.exponential();
      if (exact && all_covered(x, relevant, bound / gamma)) break;
      if (n == limit) {
        if (exact) throw_max_terms(j, limit);
        break;
      }
      sampler.draw(rng, y);
      for (std::size_t i = 0; i < d; ++i) {
        if (y[i] < 0.0 || (exact && y[i] > bound)) throw InvalidArgument("spectral sample outside [0, bound]");
        if (!sampler.structural_zeros.contains(i)) x[i] = std::max(x[i], y[i] / gamma);
      }
      ++n;
    }
    batch.terms()[j] = static_cast<std::uint32_t>(n);
  });
  return batch;
}

SampleBatch simulate(const TailDependenceFunctional& model, const SimConfig& cfg) {
  if (const auto* c = model.as_choquet()) return simulate_crsm(c->theta, cfg);
  if (const auto* s = model.as_spectral()) return simulate_spectral(SpectralSampler::from_atoms(s->atoms), s->carrier, cfg);
  return simulate_crsm(extremal_coefficients(model), cfg);
}

ScaleEstimate frechet_scale_estimate(std::span<const double> z) {
  if (z.size() < 30) throw InvalidArgument("Frechet scale estimation needs at least 30 values");
  double s = 0.0;
  for (double v : z) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("Frechet scale estimation needs positive finite values");
    s += 1.0 / v;
  }
  const double n = static_cast<double>(z.size());
  const double scale = n / s;
  return {scale, kEstimateSigmas * scale / std::sqrt(n)};
}

SubsetMask argmax_set(std::span<const double> x, double rel_tol) {
  double top = 0.0;
  for (double v : x) top = std::max(top, v);
  if (!(top > 0.0)) throw InvalidArgument("argmax set of an all-zero sup-measure is undefined");
  const double level = (1.0 - rel_tol) * top;
  SubsetMask m;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= level) m = m.with(i);
  return m;
}

ArgmaxIndependenceReport argmax_independence_test(const Capacity& theta, const SimConfig& cfg, SubsetMask k) {
  const auto batch = simulate_crsm(theta, cfg);
  const auto n = batch.samples();
  const auto full = theta.carrier().full();
  std::vector<double> t(n), ind(n), xk = batch.values_on(k);
  ArgmaxIndependenceReport r;
  r.samples = n;
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = batch.row(j);
    t[j] = 1.0 / sup_integral(row, full);
    const auto m = argmax_set(row);
    ind[j] = m.intersects(k) ? 1.0 : 0.0;
    if (m == batch.first_sets()[j]) ++r.argmax_matches_first_set;
  }
  std::tie(r.difference, r.z) = covariance_z(t, ind);
  r.pass = std::abs(r.z) <= kTestSigmas;
  r.hit_frequency = mean(ind);
  r.hit_probability = theta(k) / theta.total();

  auto sorted = xk;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double median = sorted[n / 2];
  std::vector<double> control(n);
  for (std::size_t j = 0; j < n; ++j) control[j] = xk[j] > median ? 1.0 : 0.0;
  r.control_z = covariance_z(t, control).second;
  return r;
}

CoupledBatch couple(const SpectralSampler& sampler, const Carrier& carrier, const SimConfig& cfg) {
  cfg.validate();
  if (sampler.dimension != carrier.size()) throw CarrierMismatch("sampler dimension does not match the carrier");
  if (!sampler.bound) throw InvalidArgument("coupling requires a declared bound on Y");
  const double bound = *sampler.bound;
  const bool exact = cfg.mode == SimMode::exact;
  const std::size_t limit = exact ? cfg.max_terms : cfg.truncation_terms;
  const auto d = carrier.size();
  const auto relevant = carrier.full().minus(sampler.structural_zeros);
  const auto relevant_lower = relevant.minus(sampler.never_argmax.value_or(SubsetMask{}));

  CoupledBatch out{SampleBatch(carrier, cfg.samples), SampleBatch(carrier, cfg.samples),
                   SampleBatch(carrier, cfg.samples)};
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t j) {
    PhiloxStream rng(cfg.seed, j);
    auto lo = out.lower.row(j), mid = out.middle.row(j), up = out.upper.row(j);
    std::vector<double> y(d);
    double gamma = 0.0;
    std::size_t n = 0;
    while (true) {
      gamma += rng.exponential();
      const double level = bound / gamma;
      if (exact && all_covered(mid, relevant, level) && all_covered(up, relevant, level) &&
          all_covered(lo, relevant_lower, level))
        break;
      if (n == limit) {
        if (exact) throw_max_terms(j, limit);
        break;
      }
      sampler.draw(rng, y);
      double top = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        if (sampler.structural_zeros.contains(i)) y[i] = 0.0;
        if (y[i] < 0.0 || y[i] > bound) throw InvalidArgument("spectral sample outside [0, bound]");
        top = std::max(top, y[i]);
      }
      for (std::size_t i = 0; i < d; ++i) {
        mid[i] = std::max(mid[i], y[i] / gamma);
        if (y[i] > 0.0) up[i] = std::max(up[i], top / gamma);
        if (top > 0.0 && y[i] == top) lo[i] = std::max(lo[i], top / gamma);
      }
      ++n;
    }
    out.lower.terms()[j] = out.middle.terms()[j] = out.upper.terms()[j] = static_cast<std::uint32_t>(n);
  });
  return out;
}

ContinuityBoundReport continuity_bound_check(const Capacity& theta, SubsetMask k1, SubsetMask k2, double eps,
                                             const SimConfig& cfg) {
  if (!(eps > 0.0)) throw InvalidArgument("continuity bound needs eps > 0");
  const auto batch = simulate_crsm(theta, cfg);
  const auto a = batch.values_on(k1);
  const auto b = batch.values_on(k2);
  std::size_t hits = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::abs(a[j] - b[j]) > eps) ++hits;
  ContinuityBoundReport r;
  r.exceedance = static_cast<double>(hits) / static_cast<double>(a.size());
  r.bound = (2.0 * theta(k1 | k2) - theta(k1) - theta(k2)) / eps;
  r.threshold = r.bound + kTestSigmas * binomial_sigma(r.exceedance, a.size());
  r.pass = r.exceedance <= r.threshold;
  return r;
}

DisjointIndependenceReport independence_on_disjoint(const Capacity& theta, std::span<const SubsetMask> parts,
                                                    const SimConfig& cfg) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (parts[i].intersects(parts[j])) throw InvalidArgument("parts must be pairwise disjoint");

  DisjointIndependenceReport r;
  r.additive = classify(theta).additive;
  if (parts.size() < 2) {
    r.pass = true;
    return r;
  }
  const auto batch = simulate_crsm(theta, cfg);
  const auto n = batch.samples();
  std::vector<std::vector<double>> xs;
  for (auto p : parts) xs.push_back(batch.values_on(p));

  constexpr double kQuantiles[3] = {0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      const double ti = theta(parts[i]), tj = theta(parts[j]);
      if (!(ti > 0.0) || !(tj > 0.0)) continue;  // X vanishes on that part
      for (double q : kQuantiles) {
        const double ai = ti / std::log(1.0 / q), aj = tj / std::log(1.0 / q);
        std::size_t both = 0;
        for (std::size_t s = 0; s < n; ++s)
          if (xs[i][s] <= ai && xs[j][s] <= aj) ++both;
        const double empirical = static_cast<double>(both) / static_cast<double>(n);
        const double product = q * q;
        const double sigma = binomial_sigma(product, n);
        const double dev = std::abs(empirical - product);
        const double z = dev / sigma;
        if (z > r.max_z) {
          r.max_z = z;
          r.max_deviation = dev;
          r.threshold_at_max = kTestSigmas * sigma;
        }
      }
    }
  }
  r.dependence_detected = r.max_z > kTestSigmas;
  r.pass = r.additive ? !r.dependence_detected : r.dependence_detected;
  return r;
}

CheckResult check_scale(const TailDependenceFunctional& model, const SampleBatch& batch, const PointFunction& f) {
  const auto est = frechet_scale_estimate(batch.extremal_integrals(f));
  const double target = eval(model, f);
  return {"frechet_scale", std::abs(est.scale - target), est.half_width, std::abs(est.scale - target) <= est.half_width};
}

CheckResult check_joint_cdf(const TailDependenceFunctional& model, const SampleBatch& batch,
                            std::span<const CdfPair> pairs) {
  const double p = joint_cdf(model, pairs);
  std::vector<std::vector<double>> xs;
  for (const auto& pr : pairs) xs.push_back(batch.values_on(pr.set));
  std::size_t hits = 0;
  for (std::size_t s = 0; s < batch.samples(); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < pairs.size() && ok; ++i) ok = xs[i][s] <= pairs[i].level;
    if (ok) ++hits;
  }
  const double empirical = static_cast<double>(hits) / static_cast<double>(batch.samples());
  const double threshold = kTestSigmas * binomial_sigma(p, batch.samples());
  return {"joint_cdf", std::abs(empirical - p), threshold, std::abs(empirical - p) <= threshold};
}

}  // namespace crsm
