#pragma once

// JSON interchange for carriers, capacities, Moebius measures, point
// functions and tail dependence functionals.
//
// Subsets are written as comma-joined sorted labels ("a,b"); the empty
// subset is "" and may be omitted from capacity tables. Capacity objects:
//
//   {"kind": "table", "carrier": [...], "table": {"a": 1, "b": 1, "a,b": 1.5}}
//   {"kind": "exchangeable", "carrier": [...] | "d": n, "zeta": [{"value": z, "p": q}], "c": c}
//   {"kind": "subset_size", "carrier": [...] | "d": n, "p": [p0, ..., pd], "c": c}
//   {"kind": "distortion", "carrier": [...] | "d": n, "mu": {label: w} | [w...],
//    "g": {"type": "power" | "avar", "alpha": a}}
//   {"kind": "torus_storm", "n": side, "dim": 1 | 2, "scale": s,
//    "shape": [{"p": q, "cells": [[0], [1]] or [0, 1]}]}
//   {"kind": "bernstein_compose", "g": {"drift": b, "jumps": [{"rate": s, "weight": w}]}
//    | {"power": a}, "base": <capacity>}
//
// Tail dependence functionals:
//
//   {"kind": "choquet", "theta": <capacity>}
//   {"kind": "spectral", "carrier": [...], "atoms": [{"p": q, "y": {label: v}}]}
//   {"kind": "lebesgue", "carrier": [...], "mu": {label: w}}
//
// Parse errors throw JsonError carrying a JSON-pointer path.

#include <string>
#include <string_view>
#include <vector>

#include "crsm/carrier.hpp"
#include "crsm/setfun.hpp"
#include "crsm/tdf.hpp"

namespace crsm::io {

Carrier parse_carrier(std::string_view json);
Capacity parse_capacity(std::string_view json);
MobiusMeasure parse_measure(std::string_view json);
TailDependenceFunctional parse_tdf(std::string_view json);
/// Capacity objects become Choquet functionals; TDF objects are parsed as such.
TailDependenceFunctional parse_model(std::string_view json);
/// {label: value} covering every carrier point, optionally wrapped as {"f": {...}}.
PointFunction parse_point_function(std::string_view json, const Carrier& carrier);
/// Sorted JSON array of labels.
SubsetMask parse_subset(std::string_view json, const Carrier& carrier);
/// [{"K": [labels], "a": level}, ...]
std::vector<CdfPair> parse_cdf_pairs(std::string_view json, const Carrier& carrier);

std::string carrier_to_json(const Carrier& c);
std::string subset_to_json(const Carrier& c, SubsetMask k);
std::string capacity_to_json(const Capacity& theta);
std::string measure_to_json(const MobiusMeasure& nu);
std::string point_function_to_json(const Carrier& c, std::span<const double> values);
std::string tdf_to_json(const TailDependenceFunctional& ell);

/// Canonical (sorted keys, compact) re-serialisation of a JSON document.
std::string canonical_json(std::string_view json);

}  // namespace crsm::io
