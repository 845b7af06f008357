#pragma once

#include "carnot/algebra.hpp"
#include "carnot/curves.hpp"
#include "carnot/errors.hpp"
#include "carnot/rational.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace carnot::io {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline Rational rational_from_json(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw ConfigError("structure constants must be rational strings or integers");
}

/// {"layers":[2,1],"brackets":[{"i":1,"j":2,"k":3,"c":"1"}]}; indices 1-based.
inline GradedAlgebraSpec algebra_from_json(const json& doc) {
  reject_unknown_keys(doc, {"name", "layers", "brackets"}, "algebra definition");
  GradedAlgebraSpec spec;
  spec.name = doc.value("name", std::string("custom"));
  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ConfigError("algebra definition needs a 'layers' array");
  for (const auto& d : doc["layers"]) {
    if (!d.is_number_integer()) throw ConfigError("layer dimensions must be integers");
    spec.layer_dims.push_back(d.get<int>());
  }
  if (doc.contains("brackets")) {
    for (const auto& b : doc["brackets"]) {
      reject_unknown_keys(b, {"i", "j", "k", "c"}, "bracket entry");
      if (!b.contains("i") || !b.contains("j") || !b.contains("k") || !b.contains("c"))
        throw ConfigError("bracket entries need i, j, k and c");
      spec.brackets.push_back({b["i"].get<int>(), b["j"].get<int>(), b["k"].get<int>(), rational_from_json(b["c"])});
    }
  }
  return spec;
}

inline json algebra_to_json(const ValidatedAlgebra& a) {
  json brackets = json::array();
  for (const auto& sc : a.structure_constants())
    if (sc.i < sc.j) brackets.push_back({{"i", sc.i + 1}, {"j", sc.j + 1}, {"k", sc.k + 1}, {"c", to_string(sc.c)}});
  return {{"name", a.name()}, {"layers", a.layer_dims()}, {"brackets", brackets}};
}

inline Vector vector_from_json(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(what + " must be an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

/// Sampled curve file: a JSON array of [t, [position...], [velocity...]]
/// triples, or of objects {"t":..., "position":[...], "velocity":[...]}.
inline Curve curve_from_json(const json& doc, const std::string& name) {
  if (!doc.is_array()) throw ConfigError("curve file must be a JSON array of samples");
  std::vector<CurveSample> samples;
  for (const auto& s : doc) {
    CurveSample cs;
    if (s.is_array()) {
      if (s.size() != 3 || !s[0].is_number()) throw ConfigError("curve sample must be [t, position, velocity]");
      cs.t = s[0].get<double>();
      cs.position = vector_from_json(s[1], "curve sample position");
      cs.velocity = vector_from_json(s[2], "curve sample velocity");
    } else {
      reject_unknown_keys(s, {"t", "position", "velocity"}, "curve sample");
      if (!s.contains("t") || !s.contains("position") || !s.contains("velocity"))
        throw ConfigError("curve sample needs t, position and velocity");
      cs.t = s["t"].get<double>();
      cs.position = vector_from_json(s["position"], "curve sample position");
      cs.velocity = vector_from_json(s["velocity"], "curve sample velocity");
    }
    samples.push_back(std::move(cs));
  }
  return curve_from_samples(name, std::move(samples));
}

inline json curve_to_json(const Curve& c, int samples) {
  json out = json::array();
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? c.b() : c.a() + (c.b() - c.a()) * i / (samples - 1);
    out.push_back({t, vector_to_json(c.position(t)), vector_to_json(c.velocity(t))});
  }
  return out;
}

}  // namespace carnot::io
