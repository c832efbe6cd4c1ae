#include "crsm/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "crsm/errors.hpp"

namespace crsm {

std::vector<std::size_t> SubsetMask::indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (bits_type b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

Carrier::Carrier(std::vector<std::string> labels, std::optional<TorusShape> torus)
    : labels_(std::move(labels)), torus_(torus) {
  if (labels_.empty()) throw InvalidArgument("carrier must contain at least one point");
  if (labels_.size() > kMaxCarrierSize) {
    throw SizeCapError("carrier has " + std::to_string(labels_.size()) + " points; at most " +
                       std::to_string(kMaxCarrierSize) + " are supported");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw InvalidArgument("carrier labels must be nonempty");
    if (l.find(',') != std::string::npos) {
      throw InvalidArgument("carrier label '" + l + "' contains ',' (reserved for subset keys)");
    }
    if (!seen.insert(l).second) throw InvalidArgument("duplicate carrier label '" + l + "'");
  }
  if (torus_ && torus_->points() != labels_.size()) {
    throw InvalidArgument("torus shape does not match the number of carrier points");
  }
}

Carrier Carrier::numbered(std::size_t d) {
  if (d > kMaxCarrierSize) {
    throw SizeCapError("carrier has " + std::to_string(d) + " points; at most " +
                       std::to_string(kMaxCarrierSize) + " are supported");
  }
  std::vector<std::string> labels;
  labels.reserve(d);
  for (std::size_t i = 1; i <= d; ++i) labels.push_back(std::to_string(i));
  return Carrier(std::move(labels));
}

Carrier Carrier::torus(int side, int dims) {
  if (side < 1 || (dims != 1 && dims != 2)) throw InvalidArgument("torus needs side >= 1 and dims in {1, 2}");
  const TorusShape shape{side, dims};
  if (shape.points() > kMaxCarrierSize) {
    throw SizeCapError("torus with " + std::to_string(shape.points()) + " points exceeds the carrier cap of " +
                       std::to_string(kMaxCarrierSize));
  }
  std::vector<std::string> labels;
  if (dims == 1) {
    for (int i = 0; i < side; ++i) labels.push_back(std::to_string(i));
  } else {
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) labels.push_back(std::to_string(i) + "_" + std::to_string(j));
  }
  return Carrier(std::move(labels), shape);
}

std::size_t Carrier::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidArgument("unknown carrier label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

SubsetMask Carrier::mask_of(std::span<const std::string> labels) const {
  SubsetMask m;
  for (const auto& l : labels) m = m.with(index_of(l));
  return m;
}

std::vector<std::string> Carrier::sorted_labels(SubsetMask k) const {
  std::vector<std::string> out;
  for (auto i : k.indices()) out.push_back(labels_.at(i));
  std::sort(out.begin(), out.end());
  return out;
}

std::string Carrier::key_of(SubsetMask k) const {
  std::string key;
  for (const auto& l : sorted_labels(k)) {
    if (!key.empty()) key += ',';
    key += l;
  }
  return key;
}

SubsetMask Carrier::parse_key(const std::string& key) const {
  SubsetMask m;
  if (key.empty()) return m;
  std::size_t start = 0;
  while (true) {
    const auto comma = key.find(',', start);
    const auto part = key.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto idx = index_of(part);
    if (m.contains(idx)) throw InvalidArgument("label '" + part + "' repeated in subset key '" + key + "'");
    m = m.with(idx);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return m;
}

std::vector<SubsetMask> enumerate_subsets(const Carrier& c, bool nonempty_only) {
  const auto n = c.subset_count();
  std::vector<SubsetMask> out;
  out.reserve(n);
  for (std::size_t m = nonempty_only ? 1 : 0; m < n; ++m) out.emplace_back(static_cast<SubsetMask::bits_type>(m));
  return out;
}

PointFunction::PointFunction(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("point function values must be finite and nonnegative");
  }
}

PointFunction PointFunction::constant(std::size_t d, double c) { return PointFunction(std::vector<double>(d, c)); }

PointFunction PointFunction::indicator(std::size_t d, SubsetMask k, double c) {
  std::vector<double> v(d, 0.0);
  for (auto i : k.indices()) v.at(i) = c;
  return PointFunction(std::move(v));
}

PointFunction PointFunction::scaled(double c) const {
  auto v = values_;
  for (auto& x : v) x *= c;
  return PointFunction(std::move(v));
}

PointFunction PointFunction::operator+(const PointFunction& o) const {
  if (o.size() != size()) throw CarrierMismatch("point functions have different carriers");
  auto v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return PointFunction(std::move(v));
}

PointFunction PointFunction::max_with(const PointFunction& o) const {
  if (o.size() != size()) throw CarrierMismatch("point functions have different carriers");
  auto v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], o.values_[i]);
  return PointFunction(std::move(v));
}

bool PointFunction::dominated_by(const PointFunction& o) const {
  if (o.size() != size()) throw CarrierMismatch("point functions have different carriers");
  for (std::size_t i = 0; i < size(); ++i)
    if (values_[i] > o.values_[i]) return false;
  return true;
}

SupMeasureVector::SupMeasureVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (std::isnan(v) || v < 0.0) throw InvalidArgument("sup-measure values must be nonnegative");
  }
}

double SupMeasureVector::operator()(SubsetMask k) const { return sup_integral(values_, k); }

double sup_integral(std::span<const double> g, SubsetMask k) {
  double m = 0.0;
  for (auto b = k.bits(); b != 0; b &= b - 1) m = std::max(m, g[std::countr_zero(b)]);
  return m;
}

}  // namespace crsm
