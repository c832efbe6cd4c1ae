#include "crsm/io.hpp"

#include <cmath>
#include <map>

#include "crsm/errors.hpp"
#include "crsm/transforms.hpp"
#include "json.hpp"

namespace crsm::io {

namespace {

using nlohmann::json;

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw JsonError("", std::string("invalid JSON: ") + e.what());
  }
}

std::string child(const std::string& path, const std::string& key) {
  // JSON pointer escaping.
  std::string k;
  for (char ch : key) {
    if (ch == '~')
      k += "~0";
    else if (ch == '/')
      k += "~1";
    else
      k += ch;
  }
  return path + "/" + k;
}
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw JsonError(path.empty() ? "/" : path, "expected an object");
  return j;
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) throw JsonError(child(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw JsonError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw JsonError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, child(path, key));
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw JsonError(path, "expected an integer");
  return j.get<int>();
}

std::string string_of(const json& j, const std::string& path) {
  if (!j.is_string()) throw JsonError(path, "expected a string");
  return j.get<std::string>();
}

const json& array_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw JsonError(path, "expected an array");
  return j;
}

// Runs fn, re-raising library argument errors at `path`.
template <class Fn>
auto at_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const JsonError&) {
    throw;
  } catch (const SizeCapError&) {
    throw;
  } catch (const Error& e) {
    throw JsonError(path.empty() ? "/" : path, e.what());
  }
}

Carrier carrier_from(const json& j, const std::string& path) {
  array_of(j, path);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < j.size(); ++i) labels.push_back(string_of(j[i], child(path, i)));
  return at_path(path, [&] { return Carrier(std::move(labels)); });
}

// "carrier": [...] or "d": n (labels "1".."d").
Carrier carrier_or_dimension(const json& obj, const std::string& path) {
  if (obj.contains("carrier")) return carrier_from(obj["carrier"], child(path, "carrier"));
  if (obj.contains("d")) {
    const int d = integer(obj["d"], child(path, "d"));
    if (d < 1) throw JsonError(child(path, "d"), "dimension must be positive");
    return at_path(child(path, "d"), [&] { return Carrier::numbered(static_cast<std::size_t>(d)); });
  }
  throw JsonError(child(path, "carrier"), "missing required field (or give \"d\")");
}

SubsetMask subset_from(const json& j, const Carrier& c, const std::string& path) {
  array_of(j, path);
  SubsetMask m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto label = string_of(j[i], child(path, i));
    const auto idx = at_path(child(path, i), [&] { return c.index_of(label); });
    if (m.contains(idx)) throw JsonError(child(path, i), "label '" + label + "' repeated");
    m = m.with(idx);
  }
  return m;
}

// Keyed subset table; every nonempty subset must be present.
std::vector<double> subset_table(const json& j, const Carrier& c, const std::string& path, bool allow_negative) {
  require_object(j, path);
  std::vector<double> table(c.subset_count(), 0.0);
  std::vector<bool> seen(table.size(), false);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto p = child(path, it.key());
    const auto m = at_path(p, [&] { return c.parse_key(it.key()); });
    if (seen[m.bits()]) throw JsonError(p, "subset listed twice");
    seen[m.bits()] = true;
    const double v = number(it.value(), p);
    if (m.empty()) {
      if (v != 0.0) throw JsonError(p, "value on the empty subset must be 0");
      continue;
    }
    if (!allow_negative && v < 0.0) throw JsonError(p, "value must be nonnegative");
    table[m.bits()] = v;
  }
  for (std::size_t m = 1; m < table.size(); ++m) {
    if (!seen[m]) {
      const auto key = c.key_of(SubsetMask(static_cast<SubsetMask::bits_type>(m)));
      throw JsonError(child(path, key), "missing value for subset {" + key + "}");
    }
  }
  return table;
}

std::vector<double> point_values(const json& j, const Carrier& c, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != c.size())
      throw JsonError(path, "expected " + std::to_string(c.size()) + " values, got " + std::to_string(j.size()));
    std::vector<double> v(c.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = number(j[i], child(path, i));
    return v;
  }
  require_object(j, path);
  std::vector<double> v(c.size(), 0.0);
  std::vector<bool> seen(c.size(), false);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto p = child(path, it.key());
    const auto idx = at_path(p, [&] { return c.index_of(it.key()); });
    v[idx] = number(it.value(), p);
    if (v[idx] < 0.0) throw JsonError(p, "value must be nonnegative");
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!seen[i]) throw JsonError(child(path, c.label(i)), "missing value for point '" + c.label(i) + "'");
  return v;
}

BernsteinFunction bernstein_from(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.contains("power")) {
    const double a = number(j["power"], child(path, "power"));
    return at_path(child(path, "power"), [&] { return BernsteinFunction::power(a); });
  }
  const double drift = number_or(j, "drift", 0.0, path);
  std::vector<BernsteinFunction::Jump> jumps;
  if (j.contains("jumps")) {
    const auto jp = child(path, "jumps");
    const auto& arr = array_of(j["jumps"], jp);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child(jp, i);
      jumps.push_back({number(field(arr[i], "rate", p), child(p, "rate")),
                       number(field(arr[i], "weight", p), child(p, "weight"))});
    }
  }
  return at_path(path, [&] { return BernsteinFunction(drift, std::move(jumps)); });
}

std::optional<TorusShape> torus_from(const json& obj, const std::string& path) {
  if (!obj.contains("torus")) return std::nullopt;
  const auto p = child(path, "torus");
  const auto& t = require_object(obj["torus"], p);
  return TorusShape{integer(field(t, "n", p), child(p, "n")), integer(field(t, "dim", p), child(p, "dim"))};
}

Capacity capacity_from(const json& j, const std::string& path) {
  require_object(j, path);
  const auto kind = j.contains("kind") ? string_of(j["kind"], child(path, "kind")) : std::string("table");
  if (kind == "table") {
    auto carrier = carrier_from(field(j, "carrier", path), child(path, "carrier"));
    if (auto torus = torus_from(j, path)) {
      carrier = at_path(child(path, "torus"), [&] { return Carrier(carrier.labels(), torus); });
    }
    auto table = subset_table(field(j, "table", path), carrier, child(path, "table"), false);
    return at_path(child(path, "table"), [&] { return Capacity(carrier, std::move(table)); });
  }
  if (kind == "exchangeable") {
    const auto carrier = carrier_or_dimension(j, path);
    const auto zp = child(path, "zeta");
    const auto& arr = array_of(field(j, "zeta", path), zp);
    std::vector<MixingAtom> zeta;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child(zp, i);
      zeta.push_back({number(field(arr[i], "value", p), child(p, "value")),
                      number(field(arr[i], "p", p), child(p, "p"))});
    }
    const double c = number_or(j, "c", 1.0, path);
    return at_path(path, [&] { return exchangeable_capacity(carrier, zeta, c); });
  }
  if (kind == "subset_size") {
    const auto carrier = carrier_or_dimension(j, path);
    const auto pp = child(path, "p");
    const auto& arr = array_of(field(j, "p", path), pp);
    std::vector<double> p;
    for (std::size_t i = 0; i < arr.size(); ++i) p.push_back(number(arr[i], child(pp, i)));
    const double c = number_or(j, "c", 1.0, path);
    return at_path(path, [&] { return subset_size_capacity(carrier, p, c); });
  }
  if (kind == "distortion") {
    const auto carrier = carrier_or_dimension(j, path);
    const auto mu = point_values(field(j, "mu", path), carrier, child(path, "mu"));
    const auto gp = child(path, "g");
    const auto& g = require_object(field(j, "g", path), gp);
    const auto type = string_of(field(g, "type", gp), child(gp, "type"));
    Distortion dist;
    if (type == "power")
      dist.kind = Distortion::Kind::power;
    else if (type == "avar")
      dist.kind = Distortion::Kind::avar;
    else
      throw JsonError(child(gp, "type"), "unknown distortion '" + type + "' (expected power or avar)");
    dist.alpha = number(field(g, "alpha", gp), child(gp, "alpha"));
    return at_path(path, [&] { return distortion_capacity(carrier, mu, dist); });
  }
  if (kind == "torus_storm") {
    const int n = integer(field(j, "n", path), child(path, "n"));
    const int dim = j.contains("dim") ? integer(j["dim"], child(path, "dim")) : 1;
    const double scale = number_or(j, "scale", 1.0, path);
    const auto sp = child(path, "shape");
    const auto& arr = array_of(field(j, "shape", path), sp);
    std::vector<StormShape> shapes;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child(sp, i);
      StormShape s;
      s.probability = number(field(arr[i], "p", p), child(p, "p"));
      const auto cp = child(p, "cells");
      const auto& cells = array_of(field(arr[i], "cells", p), cp);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].is_number_integer()) {
          s.cells.push_back({integer(cells[c], child(cp, c))});
        } else {
          const auto& cell = array_of(cells[c], child(cp, c));
          std::vector<int> coords;
          for (std::size_t a = 0; a < cell.size(); ++a) coords.push_back(integer(cell[a], child(child(cp, c), a)));
          s.cells.push_back(std::move(coords));
        }
      }
      shapes.push_back(std::move(s));
    }
    return at_path(path, [&] { return torus_storm_capacity(n, dim, shapes, scale); });
  }
  if (kind == "bernstein_compose") {
    const auto g = bernstein_from(field(j, "g", path), child(path, "g"));
    const auto base = capacity_from(field(j, "base", path), child(path, "base"));
    return at_path(path, [&] { return compose_capacity(g, base); });
  }
  throw JsonError(child(path, "kind"), "unknown capacity kind '" + kind + "'");
}

bool is_tdf_kind(const std::string& kind) { return kind == "choquet" || kind == "spectral" || kind == "lebesgue"; }

TailDependenceFunctional tdf_from(const json& j, const std::string& path) {
  require_object(j, path);
  const auto kind = string_of(field(j, "kind", path), child(path, "kind"));
  if (kind == "choquet") return TailDependenceFunctional::choquet(capacity_from(field(j, "theta", path), child(path, "theta")));
  if (kind == "spectral") {
    const auto carrier = carrier_from(field(j, "carrier", path), child(path, "carrier"));
    const auto ap = child(path, "atoms");
    const auto& arr = array_of(field(j, "atoms", path), ap);
    std::vector<SpectralAtom> atoms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child(ap, i);
      const double prob = number(field(arr[i], "p", p), child(p, "p"));
      auto y = point_values(field(arr[i], "y", p), carrier, child(p, "y"));
      atoms.push_back({prob, at_path(child(p, "y"), [&] { return PointFunction(std::move(y)); })});
    }
    return at_path(ap, [&] { return TailDependenceFunctional::spectral(carrier, std::move(atoms)); });
  }
  if (kind == "lebesgue") {
    const auto carrier = carrier_from(field(j, "carrier", path), child(path, "carrier"));
    auto mu = point_values(field(j, "mu", path), carrier, child(path, "mu"));
    return at_path(child(path, "mu"),
                   [&] { return TailDependenceFunctional::lebesgue(carrier, DiscreteMeasure(std::move(mu))); });
  }
  throw JsonError(child(path, "kind"), "unknown functional kind '" + kind + "'");
}

json carrier_json(const Carrier& c) { return json(c.labels()); }

json capacity_json(const Capacity& theta) {
  const auto& c = theta.carrier();
  json table = json::object();
  for (std::size_t m = 1; m < c.subset_count(); ++m) {
    const SubsetMask k(static_cast<SubsetMask::bits_type>(m));
    table[c.key_of(k)] = theta(k);
  }
  json out{{"kind", "table"}, {"carrier", carrier_json(c)}, {"table", std::move(table)}};
  if (const auto& t = c.torus_shape()) out["torus"] = json{{"n", t->side}, {"dim", t->dims}};
  return out;
}

json point_json(const Carrier& c, std::span<const double> v) {
  json out = json::object();
  for (std::size_t i = 0; i < c.size(); ++i) out[c.label(i)] = v[i];
  return out;
}

}  // namespace

Carrier parse_carrier(std::string_view text) { return carrier_from(parse_text(text), ""); }

Capacity parse_capacity(std::string_view text) { return capacity_from(parse_text(text), ""); }

MobiusMeasure parse_measure(std::string_view text) {
  const auto j = parse_text(text);
  const auto carrier = carrier_from(field(j, "carrier", ""), "/carrier");
  auto w = subset_table(field(j, "weights", ""), carrier, "/weights", true);
  return at_path("/weights", [&] { return MobiusMeasure(carrier, std::move(w)); });
}

TailDependenceFunctional parse_tdf(std::string_view text) { return tdf_from(parse_text(text), ""); }

TailDependenceFunctional parse_model(std::string_view text) {
  const auto j = parse_text(text);
  require_object(j, "");
  if (j.contains("kind") && j["kind"].is_string() && is_tdf_kind(j["kind"].get<std::string>())) return tdf_from(j, "");
  return TailDependenceFunctional::choquet(capacity_from(j, ""));
}

PointFunction parse_point_function(std::string_view text, const Carrier& carrier) {
  auto j = parse_text(text);
  std::string path;
  if (j.is_object() && j.contains("f") && j.size() == 1) {
    j = j["f"];
    path = "/f";
  }
  auto v = point_values(j, carrier, path);
  return at_path(path, [&] { return PointFunction(std::move(v)); });
}

SubsetMask parse_subset(std::string_view text, const Carrier& carrier) { return subset_from(parse_text(text), carrier, ""); }

std::vector<CdfPair> parse_cdf_pairs(std::string_view text, const Carrier& carrier) {
  const auto j = parse_text(text);
  const auto& arr = array_of(j, "");
  std::vector<CdfPair> pairs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = child("", i);
    const auto k = subset_from(field(arr[i], "K", p), carrier, child(p, "K"));
    const double a = number(field(arr[i], "a", p), child(p, "a"));
    if (!(a > 0.0)) throw JsonError(child(p, "a"), "level must be positive");
    pairs.push_back({k, a});
  }
  return pairs;
}

std::string carrier_to_json(const Carrier& c) { return carrier_json(c).dump(); }

std::string subset_to_json(const Carrier& c, SubsetMask k) { return json(c.sorted_labels(k)).dump(); }

std::string capacity_to_json(const Capacity& theta) { return capacity_json(theta).dump(); }

std::string measure_to_json(const MobiusMeasure& nu) {
  const auto& c = nu.carrier();
  json weights = json::object();
  for (std::size_t m = 1; m < c.subset_count(); ++m) {
    const SubsetMask k(static_cast<SubsetMask::bits_type>(m));
    weights[c.key_of(k)] = nu(k);
  }
  return json{{"kind", "mobius"}, {"carrier", carrier_json(c)}, {"weights", std::move(weights)}}.dump();
}

std::string point_function_to_json(const Carrier& c, std::span<const double> values) {
  return point_json(c, values).dump();
}

std::string tdf_to_json(const TailDependenceFunctional& ell) {
  if (const auto* c = ell.as_choquet()) return json{{"kind", "choquet"}, {"theta", capacity_json(c->theta)}}.dump();
  if (const auto* s = ell.as_spectral()) {
    json atoms = json::array();
    for (const auto& a : s->atoms) atoms.push_back({{"p", a.probability}, {"y", point_json(s->carrier, a.values.values())}});
    return json{{"kind", "spectral"}, {"carrier", carrier_json(s->carrier)}, {"atoms", std::move(atoms)}}.dump();
  }
  const auto* l = ell.as_lebesgue();
  return json{{"kind", "lebesgue"}, {"carrier", carrier_json(l->carrier)}, {"mu", point_json(l->carrier, l->mu.weights())}}
      .dump();
}

std::string canonical_json(std::string_view text) { return parse_text(text).dump(); }

}  // namespace crsm::io
