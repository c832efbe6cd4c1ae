#include "crsm_tools/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crsm/errors.hpp"
#include "crsm/integrals.hpp"
#include "crsm/io.hpp"
#include "crsm/simulate.hpp"
#include "crsm/tdf.hpp"
#include "json.hpp"

namespace crsm::cli {

namespace {

using nlohmann::json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadJson = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitOther = 4;

struct Options {
  std::string model_path;
  std::string f;
  std::string pairs;
  std::string subset;
  std::string in;
  std::string out;
  std::string format = "csv";
  std::string mode = "exact";
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  bool deterministic = false;
};

/// Loaded model document with its provenance hash.
struct Model {
  std::string text;
  TailDependenceFunctional ell;
  std::string hash;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Inline JSON when the argument looks like JSON, a file path otherwise.
std::string json_argument(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  return read_file(arg);
}

std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Model load_model(const Options& o) {
  if (o.model_path.empty()) throw Error("--model is required");
  auto text = read_file(o.model_path);
  auto ell = io::parse_model(text);
  return {text, std::move(ell), fnv1a_hex(io::canonical_json(text))};
}

/// Extremal coefficients of the model; the capacity itself for Choquet models.
Capacity capacity_of(const TailDependenceFunctional& ell) {
  if (const auto* c = ell.as_choquet()) return c->theta;
  return extremal_coefficients(ell);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json provenance(const Options& o, const Model& m) {
  json p{{"tool_version", CRSM_TOOL_VERSION}, {"model_hash", m.hash}};
  p["seed"] = o.seed ? json(*o.seed) : json(nullptr);
  if (!o.deterministic) p["timestamp"] = utc_timestamp();
  return p;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

void emit(const Options& o, const Model& m, json doc, std::ostream& out) {
  doc["provenance"] = provenance(o, m);
  write_text(o.out, doc.dump(2) + "\n", out);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SimConfig sim_config(const Options& o) {
  SimConfig cfg;
  cfg.seed = *o.seed;
  cfg.samples = o.samples;
  cfg = with_mode(cfg, o.mode);
  cfg.validate();
  return cfg;
}

json labels_json(const Carrier& c, SubsetMask k) { return json(c.sorted_labels(k)); }

json check_json(const CheckResult& r) {
  return {{"check", r.check}, {"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.pass}};
}

/// Spectral atoms of any model: the declared ones, or indicator atoms
/// theta(E) 1_F with probability nu(F) / theta(E).
std::vector<SpectralAtom> atoms_of(const TailDependenceFunctional& ell) {
  if (const auto* s = ell.as_spectral()) return s->atoms;
  const auto theta = capacity_of(ell);
  const auto cls = classify(theta);
  if (!cls.completely_alternating) throw NotCompletelyAlternating("model capacity is not completely alternating");
  const auto nu = mobius_inverse(theta);
  const double total = theta.total();
  const auto d = theta.carrier().size();
  std::vector<SpectralAtom> atoms;
  for (std::size_t m = 1; m < theta.carrier().subset_count(); ++m) {
    const SubsetMask f(static_cast<SubsetMask::bits_type>(m));
    if (nu(f) > 0.0) atoms.push_back({nu(f) / total, PointFunction::indicator(d, f, total)});
  }
  // Renormalise away rounding in the Moebius weights.
  double s = 0.0;
  for (const auto& a : atoms) s += a.probability;
  for (auto& a : atoms) a.probability /= s;
  return atoms;
}

SampleBatch read_batch_csv(const std::string& path, const Carrier& carrier) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "' is empty");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // sample_index
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != carrier.size()) throw CarrierMismatch("batch row width does not match the model carrier");
    rows.push_back(std::move(row));
  }
  SampleBatch batch(carrier, rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) std::copy(rows[j].begin(), rows[j].end(), batch.row(j).begin());
  return batch;
}

// ---------------------------------------------------------------- commands

int cmd_check(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  const auto theta = capacity_of(m.ell);
  const auto cls = classify(theta);
  const auto& c = theta.carrier();
  json doc{{"completely_alternating", cls.completely_alternating},
           {"monotone", cls.monotone},
           {"maxitive", cls.maxitive},
           {"additive", cls.additive},
           {"min_weight", cls.min_weight}};
  doc["witness"] = cls.completely_alternating ? json(nullptr)
                                              : json{{"F", labels_json(c, cls.min_witness)}, {"nu", cls.min_weight}};
  // Direct successive differences: exhaustive for d <= 3, sampled (seeded) beyond.
  if (c.size() <= 3 || o.seed) {
    const auto r = check_complete_alternation_direct(theta, 4, o.seed.value_or(0));
    json family = json::array();
    for (auto k : r.family) family.push_back(labels_json(c, k));
    doc["direct"] = {{"violation", r.violation},       {"exhaustive", r.exhaustive},
                     {"families_checked", r.families_checked}, {"max_value", r.max_value},
                     {"K", labels_json(c, r.base)},    {"family", std::move(family)}};
  }
  emit(o, m, std::move(doc), out);
  return 0;
}

int cmd_mobius(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  emit(o, m, json::parse(io::measure_to_json(mobius_inverse(capacity_of(m.ell)))), out);
  return 0;
}

int cmd_materialize(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  emit(o, m, json::parse(io::capacity_to_json(capacity_of(m.ell))), out);
  return 0;
}

int cmd_integral(const Options& o, std::ostream& out, bool choquet) {
  const auto m = load_model(o);
  if (o.f.empty()) throw Error("--f is required");
  const auto theta = capacity_of(m.ell);
  const auto f = io::parse_point_function(json_argument(o.f), theta.carrier());
  const double v = choquet ? choquet_integral(f, theta) : extremal_integral(f, theta);
  write_text(o.out, json(v).dump() + "\n", out);
  if (!o.out.empty()) write_text(o.out + ".meta.json", json{{"provenance", provenance(o, m)}}.dump(2) + "\n", out);
  return 0;
}

int cmd_dual(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  if (o.f.empty()) throw Error("--f is required");
  const auto theta = capacity_of(m.ell);
  const auto f = io::parse_point_function(json_argument(o.f), theta.carrier());
  const auto g = dual_greedy(theta, f);
  json doc{{"greedy", g.value}};
  doc["oracle"] = theta.carrier().size() <= 3 ? json(dual_oracle_exact(theta, f)) : json(nullptr);
  doc["measure"] = json::parse(io::point_function_to_json(theta.carrier(), g.measure.weights()));
  emit(o, m, std::move(doc), out);
  return 0;
}

int cmd_cdf(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  if (o.pairs.empty()) throw Error("--pairs is required");
  const auto pairs = io::parse_cdf_pairs(json_argument(o.pairs), m.ell.carrier());
  emit(o, m, json{{"cdf", joint_cdf(m.ell, pairs)}}, out);
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  const auto batch = simulate(m.ell, sim_config(o));
  const auto& c = batch.carrier();
  if (o.format == "json") {
    json rows = json::array();
    for (std::size_t j = 0; j < batch.samples(); ++j) {
      const auto r = batch.row(j);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    emit(o, m, json{{"carrier", c.labels()}, {"mode", o.mode}, {"samples", std::move(rows)}}, out);
    return 0;
  }
  std::string csv = "sample_index";
  for (const auto& l : c.labels()) csv += "," + l;
  csv += "\n";
  for (std::size_t j = 0; j < batch.samples(); ++j) {
    csv += std::to_string(j);
    for (double v : batch.row(j)) csv += "," + format_double(v);
    csv += "\n";
  }
  write_text(o.out, csv, out);
  if (!o.out.empty()) {
    json meta{{"carrier", c.labels()}, {"mode", o.mode}, {"samples", batch.samples()}};
    meta["provenance"] = provenance(o, m);
    write_text(o.out + ".meta.json", meta.dump(2) + "\n", out);
  }
  return 0;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  if (o.f.empty()) throw Error("--f is required");
  const auto f = io::parse_point_function(json_argument(o.f), m.ell.carrier());
  const auto batch = o.in.empty() ? simulate(m.ell, sim_config(o)) : read_batch_csv(o.in, m.ell.carrier());
  const auto est = frechet_scale_estimate(batch.extremal_integrals(f));
  const double expected = eval(m.ell, f);
  emit(o, m,
       json{{"scale", est.scale},
            {"half_width", est.half_width},
            {"expected", expected},
            {"samples", batch.samples()},
            {"pass", std::abs(est.scale - expected) <= est.half_width}},
       out);
  return 0;
}

int cmd_couple(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  const auto& c = m.ell.carrier();
  const auto cb = couple(SpectralSampler::from_atoms(atoms_of(m.ell)), c, sim_config(o));
  std::size_t violations = 0, strict_lower = 0, strict_upper = 0;
  for (std::size_t j = 0; j < cb.middle.samples(); ++j) {
    for (std::size_t x = 0; x < c.size(); ++x) {
      const double lo = cb.lower.row(j)[x], mid = cb.middle.row(j)[x], up = cb.upper.row(j)[x];
      violations += !(lo <= mid && mid <= up);
      strict_lower += lo < mid;
      strict_upper += mid < up;
    }
  }
  if (!o.out.empty()) {
    std::string csv = "sample_index";
    for (const char* series : {"lower", "middle", "upper"})
      for (const auto& l : c.labels()) csv += std::string(",") + series + ":" + l;
    csv += "\n";
    for (std::size_t j = 0; j < cb.middle.samples(); ++j) {
      csv += std::to_string(j);
      for (const auto* b : {&cb.lower, &cb.middle, &cb.upper})
        for (double v : b->row(j)) csv += "," + format_double(v);
      csv += "\n";
    }
    write_text(o.out, csv, out);
    json meta{{"carrier", c.labels()}, {"samples", cb.middle.samples()}};
    meta["provenance"] = provenance(o, m);
    write_text(o.out + ".meta.json", meta.dump(2) + "\n", out);
  }
  json doc{{"samples", cb.middle.samples()},
           {"violations", violations},
           {"strict_lower_points", strict_lower},
           {"strict_upper_points", strict_upper}};
  doc["provenance"] = provenance(o, m);
  out << doc.dump(2) << "\n";
  return violations == 0 ? 0 : kExitVerifyFailed;
}

int cmd_argmax(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  const auto theta = capacity_of(m.ell);
  const auto& c = theta.carrier();
  const SubsetMask k = o.subset.empty() ? SubsetMask::singleton(0) : io::parse_subset(json_argument(o.subset), c);
  const auto r = argmax_independence_test(theta, sim_config(o), k);
  emit(o, m,
       json{{"K", labels_json(c, k)},
            {"samples", r.samples},
            {"difference", r.difference},
            {"z", r.z},
            {"threshold", 4.0},
            {"pass", r.pass},
            {"control_z", r.control_z},
            {"argmax_matches_first_set", r.argmax_matches_first_set},
            {"hit_frequency", r.hit_frequency},
            {"hit_probability", r.hit_probability}},
       out);
  return r.pass ? 0 : kExitVerifyFailed;
}

/// Statistical suite for one model; see the README for the list of checks.
std::vector<CheckResult> verify_checks(const TailDependenceFunctional& ell, const SimConfig& cfg) {
  std::vector<CheckResult> checks;
  const auto theta = capacity_of(ell);
  const auto& c = theta.carrier();
  const auto d = c.size();
  const double tol = set_function_tolerance();

  const auto cls = classify(theta);
  checks.push_back({"completely_alternating", cls.min_weight, -tol, cls.completely_alternating});
  // Nothing else can be simulated without a valid CRSM.
  if (!cls.completely_alternating) return checks;

  const auto batch = simulate(ell, cfg);

  std::vector<std::pair<std::string, PointFunction>> fs;
  fs.emplace_back("1_E", PointFunction::constant(d, 1.0));
  for (std::size_t x = 0; x < std::min<std::size_t>(d, 6); ++x)
    fs.emplace_back("1_" + c.label(x), PointFunction::indicator(d, SubsetMask::singleton(x)));
  std::vector<double> ramp(d);
  for (std::size_t x = 0; x < d; ++x) ramp[x] = double(x + 1) / double(d);
  fs.emplace_back("ramp", PointFunction(ramp));
  for (const auto& [name, f] : fs) {
    if (!(eval(ell, f) > 0.0)) continue;  // degenerate: X vanishes on the support of f
    auto r = check_scale(ell, batch, f);
    r.check = "scale[" + name + "]";
    checks.push_back(r);
  }

  std::vector<SubsetMask> sets{c.full()};
  for (std::size_t x = 0; x < std::min<std::size_t>(d, 6); ++x) sets.push_back(SubsetMask::singleton(x));
  for (double q : {0.25, 0.5, 0.75}) {
    std::vector<CdfPair> pairs;
    for (auto k : sets)
      if (theta(k) > 0.0) pairs.push_back({k, theta(k) / std::log(1.0 / q)});
    // Each set alone, then all of them jointly.
    for (const auto& p : pairs) {
      auto r = check_joint_cdf(ell, batch, std::span(&p, 1));
      r.check = "cdf[{" + c.key_of(p.set) + "};q=" + format_double(q) + "]";
      checks.push_back(r);
    }
    auto r = check_joint_cdf(ell, batch, pairs);
    r.check = "cdf[joint;q=" + format_double(q) + "]";
    checks.push_back(r);
  }

  if (ell.kind() == TailDependenceFunctional::Kind::spectral) {
    const auto cb = couple(SpectralSampler::from_atoms(ell.as_spectral()->atoms), c, cfg);
    double violations = 0;
    for (std::size_t j = 0; j < cb.middle.samples(); ++j)
      for (std::size_t x = 0; x < d; ++x)
        violations += !(cb.lower.row(j)[x] <= cb.middle.row(j)[x] && cb.middle.row(j)[x] <= cb.upper.row(j)[x]);
    checks.push_back({"coupling_order", violations, 0.0, violations == 0});
    return checks;
  }

  SubsetMask k;
  for (std::size_t x = 0; x < d && k.empty(); ++x)
    if (theta(SubsetMask::singleton(x)) > 0.0) k = SubsetMask::singleton(x);
  const auto a = argmax_independence_test(theta, cfg, k);
  checks.push_back({"argmax_independence[{" + c.key_of(k) + "}]", std::abs(a.z), 4.0, a.pass});
  checks.push_back({"argmax_negative_control[{" + c.key_of(k) + "}]", std::abs(a.control_z), 4.0,
                    std::abs(a.control_z) > 4.0});

  if (d >= 2) {
    const auto k1 = SubsetMask::singleton(0), k2 = SubsetMask::singleton(1);
    const auto cb = continuity_bound_check(theta, k1, k2, theta.total(), cfg);
    checks.push_back({"continuity_bound", cb.exceedance, cb.threshold, cb.pass});

    std::vector<SubsetMask> parts;
    for (std::size_t x = 0; x < std::min<std::size_t>(d, 6); ++x) parts.push_back(SubsetMask::singleton(x));
    const auto ind = independence_on_disjoint(theta, parts, cfg);
    checks.push_back({ind.additive ? "independence_on_disjoint" : "dependence_on_disjoint", ind.max_z, 4.0, ind.pass});
  }
  return checks;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto m = load_model(o);
  const auto checks = verify_checks(m.ell, sim_config(o));
  bool all = true;
  json list = json::array();
  for (const auto& r : checks) {
    list.push_back(check_json(r));
    all = all && r.pass;
  }
  emit(o, m, json{{"model_kind", to_string(m.ell.kind())}, {"samples", o.samples}, {"pass", all}, {"checks", list}},
       out);
  return all ? 0 : kExitVerifyFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Max-stable random sup-measures and Choquet random sup-measures on finite carriers", "crsm"};
  app.set_version_flag("--version", std::string(CRSM_TOOL_VERSION));
  app.require_subcommand(1);

  Options o;
  auto model = [&](CLI::App* s) { s->add_option("--model", o.model_path, "Capacity or functional JSON file")->required(); };
  auto f = [&](CLI::App* s) { s->add_option("--f", o.f, "Point function as JSON or a JSON file path")->required(); };
  auto common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "Output path (stdout when omitted)");
    s->add_option("--tolerance", o.tolerance, "Tolerance for Moebius weights and alternation checks");
    s->add_flag("--deterministic", o.deterministic, "Omit the timestamp from provenance");
  };
  auto random = [&](CLI::App* s, bool seed_required) {
    auto* seed = s->add_option("--seed", o.seed, "Random seed (unsigned 64-bit)");
    if (seed_required) seed->required();
  };
  auto sim = [&](CLI::App* s) {
    random(s, true);
    s->add_option("--samples", o.samples, "Number of samples")->check(CLI::PositiveNumber);
    s->add_option("--mode", o.mode, "exact or truncated:K");
  };

  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
  auto add = [&](const char* name, const char* help, std::function<void(CLI::App*)> opts, std::function<int()> fn) {
    auto* s = app.add_subcommand(name, help);
    opts(s);
    common(s);
    commands.emplace_back(s, std::move(fn));
  };

  add("check", "Classify a capacity and report a complete-alternation witness",
      [&](CLI::App* s) { model(s); random(s, false); }, [&] { return cmd_check(o, out); });
  add("mobius", "Moebius measure of a capacity", [&](CLI::App* s) { model(s); }, [&] { return cmd_mobius(o, out); });
  add("materialize", "Expand any capacity constructor to a plain table", [&](CLI::App* s) { model(s); },
      [&] { return cmd_materialize(o, out); });
  add("choquet", "Choquet integral of f", [&](CLI::App* s) { model(s); f(s); },
      [&] { return cmd_integral(o, out, true); });
  add("extremal", "Extremal integral of f", [&](CLI::App* s) { model(s); f(s); },
      [&] { return cmd_integral(o, out, false); });
  add("dual", "Greedy and exact dual representations of the Choquet integral", [&](CLI::App* s) { model(s); f(s); },
      [&] { return cmd_dual(o, out); });
  add("cdf", "Joint distribution function P(X(K_i) <= a_i for all i)",
      [&](CLI::App* s) {
        model(s);
        s->add_option("--pairs", o.pairs, "[{\"K\": [labels], \"a\": level}] as JSON or a file path")->required();
      },
      [&] { return cmd_cdf(o, out); });
  add("simulate", "Simulate the max-stable sup-measure",
      [&](CLI::App* s) {
        model(s);
        sim(s);
        s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
      },
      [&] { return cmd_simulate(o, out); });
  add("estimate", "Frechet scale estimate of the extremal integral of f",
      [&](CLI::App* s) {
        model(s);
        f(s);
        sim(s);
        s->add_option("--in", o.in, "Read samples from a simulate CSV instead of simulating");
      },
      [&] { return cmd_estimate(o, out); });
  add("couple", "Pathwise coupling X_* <= X <= X^*", [&](CLI::App* s) { model(s); sim(s); },
      [&] { return cmd_couple(o, out); });
  add("argmax-test", "Independence of the argmax set and X(E)",
      [&](CLI::App* s) {
        model(s);
        sim(s);
        s->add_option("--K", o.subset, "Subset as a JSON label array (default: first point)");
      },
      [&] { return cmd_argmax(o, out); });
  add("verify", "Run the statistical verification suite", [&](CLI::App* s) { model(s); sim(s); },
      [&] { return cmd_verify(o, out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const double saved_tolerance = set_function_tolerance();
  try {
    if (o.tolerance) set_set_function_tolerance(*o.tolerance);
    for (auto& [s, fn] : commands) {
      if (s->parsed()) {
        const int code = fn();
        set_set_function_tolerance(saved_tolerance);
        return code;
      }
    }
  } catch (const JsonError& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    set_set_function_tolerance(saved_tolerance);
    return kExitBadJson;
  } catch (const SizeCapError& e) {
    err << "error: " << e.what() << "\n";
    set_set_function_tolerance(saved_tolerance);
    return kExitSizeCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    set_set_function_tolerance(saved_tolerance);
    return kExitOther;
  }
  set_set_function_tolerance(saved_tolerance);
  return kExitOther;
}

}  // namespace crsm::cli
