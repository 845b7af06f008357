#pragma once

#include "carnot/carnot.hpp"
#include "carnot/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace carnot::experiment {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Fully resolved run description. `resolved` is echoed verbatim into the
/// report, so it carries every default that the run used.
struct ExperimentConfig {
  json resolved;
  GradedAlgebraSpec group_spec;
  std::vector<double> eps;
  std::optional<json> curve;  ///< fixture name or sample file path
  std::string op;
  json params;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
};

struct OpInfo {
  std::string name;
  std::string description;
  bool needs_curve;
  bool needs_seed;
};

inline const std::vector<OpInfo>& operations() {
  static const std::vector<OpInfo> ops = {
      {"group-check", "validate the algebra, print Q, audit associativity and inverses", false, true},
      {"frame-show", "print the left-invariant frame coefficients a^l_j", false, false},
      {"metric-audit", "sample the triangle inequality of the layer-max distance", false, true},
      {"ball-box", "estimate the ball-box constant lambda", false, true},
      {"curve-degree", "degree profile of a curve on a uniform grid", true, false},
      {"little-o", "fitted coordinate decay exponents at a curve point", true, false},
      {"blowup", "blow-up ratios at a point of maximal degree", true, false},
      {"diverge", "density divergence at a point of lower degree", true, false},
      {"cover", "greedy spherical-measure covers along a delta schedule", true, false},
      {"area", "area formula residual c_q S^q vs integral of |tau^q|", true, false},
      {"negligibility", "covers of the low-degree set along a delta schedule", true, false},
      {"federer", "density lemma bracket on a parameter set", true, false},
  };
  return ops;
}

inline const OpInfo& op_info(const std::string& name) {
  for (const auto& o : operations())
    if (o.name == name) return o;
  throw ConfigError("unknown op '" + name + "'");
}

/// "2^-1..2^-10" (halving schedule), "0.5,0.25" or a JSON array.
inline std::vector<double> parse_schedule(const json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(what + " entries must be numbers");
      out.push_back(x.get<double>());
    }
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    static const std::regex range(R"(\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*)");
    std::smatch m;
    if (std::regex_match(s, m, range)) {
      const int a = std::stoi(m[1]), b = std::stoi(m[2]);
      const int step = a <= b ? 1 : -1;
      for (int k = a;; k += step) {
        out.push_back(std::ldexp(1.0, k));
        if (k == b) break;
      }
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          out.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw ConfigError("cannot parse " + what + " '" + s + "'");
        }
      }
    }
  } else {
    throw ConfigError(what + " must be an array or a string like 2^-1..2^-10");
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  for (double x : out)
    if (!(x > 0) || !std::isfinite(x)) throw ConfigError(what + " entries must be positive");
  return out;
}

inline GradedAlgebraSpec resolve_group(const json& g) {
  if (g.is_object()) return io::algebra_from_json(g);
  if (!g.is_string()) throw ConfigError("group must be a name, an algebra file path or an inline definition");
  const std::string s = g.get<std::string>();
  for (const auto& [name, desc] : algebras::catalog())
    if (name == s) return algebras::by_name(s);
  return io::algebra_from_json(io::read_json_file(s));
}

namespace detail {

inline json take(json& params, const std::string& key, json fallback) {
  if (params.contains(key)) return params[key];
  params[key] = fallback;
  return fallback;
}

}  // namespace detail

/// Validates a config document and fills every default. Unknown keys anywhere
/// are errors.
inline ExperimentConfig resolve_config(const json& doc) {
  io::reject_unknown_keys(doc, {"schema", "group", "eps", "curve", "op", "params", "seed", "out", "format"}, "config");
  ExperimentConfig cfg;
  const int schema = doc.value("schema", kSchemaVersion);
  if (schema != kSchemaVersion) throw ConfigError("unsupported config schema " + std::to_string(schema));
  if (!doc.contains("group")) throw ConfigError("config needs a group");
  if (!doc.contains("op") || !doc["op"].is_string()) throw ConfigError("config needs an op");
  cfg.op = doc["op"].get<std::string>();
  const OpInfo& info = op_info(cfg.op);
  cfg.group_spec = resolve_group(doc["group"]);

  json r;
  r["schema"] = kSchemaVersion;
  r["group"] = doc["group"];
  r["op"] = cfg.op;

  const int step = static_cast<int>(cfg.group_spec.layer_dims.size());
  if (doc.contains("eps")) {
    const json& e = doc["eps"];
    if (e.is_string()) {
      for (double x : parse_schedule(e, "eps")) cfg.eps.push_back(x);
    } else {
      cfg.eps = parse_schedule(e, "eps");
    }
  } else {
    cfg.eps.assign(static_cast<std::size_t>(step), 1.0);
  }
  r["eps"] = cfg.eps;

  if (doc.contains("curve")) {
    if (!doc["curve"].is_string()) throw ConfigError("curve must be a fixture name or a sample file path");
    cfg.curve = doc["curve"];
    r["curve"] = doc["curve"];
  } else if (info.needs_curve) {
    throw ConfigError("op '" + cfg.op + "' needs a curve");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
    r["seed"] = *cfg.seed;
  } else if (info.needs_seed) {
    throw ConfigError("op '" + cfg.op + "' samples randomly and needs an explicit seed");
  }

  cfg.format = doc.value("format", std::string("json"));
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("format must be json or csv");
  r["format"] = cfg.format;
  cfg.out = doc.value("out", std::string());
  r["out"] = cfg.out;

  json p = doc.value("params", json::object());
  if (!p.is_object()) throw ConfigError("params must be an object");
  std::set<std::string> allowed;
  auto use = [&](const std::string& key, json fallback) {
    allowed.insert(key);
    detail::take(p, key, std::move(fallback));
  };
  const std::string& op = cfg.op;
  if (op == "group-check") {
    use("rational_samples", 100);
    use("float_samples", 1000);
  } else if (op == "metric-audit") {
    use("samples", 100000);
  } else if (op == "ball-box") {
    use("resolution", 20000);
  } else if (op == "curve-degree") {
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "little-o") {
    use("t0", 0.0);
    use("h0", 0.1);
    use("levels", 20);
    use("margin", 0.05);
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "blowup") {
    use("t0", 0.0);
    use("radii", "2^-1..2^-10");
    use("metric", "euclidean");
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "diverge") {
    use("t0", 0.0);
    use("radii", "2^-4..2^-12");
    use("margin", 0.5);
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "cover") {
    use("q", nullptr);
    use("deltas", "2^-2..2^-10");
  } else if (op == "area") {
    use("metric", "euclidean");
    use("delta0", 0.25);
    use("levels", 9);
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "negligibility") {
    use("deltas", "2^-2..2^-10");
    use("grid", 2001);
    use("tol_rel", kDefaultDegreeTolerance);
  } else if (op == "federer") {
    use("Z", nullptr);
    use("a", nullptr);
    use("kappa", 1.0);
    use("radii", "2^-2..2^-9");
  }
  for (const auto& [key, value] : p.items())
    if (!allowed.count(key)) throw ConfigError("unknown parameter '" + key + "' for op '" + op + "'");
  cfg.params = p;
  r["params"] = p;
  cfg.resolved = r;
  return cfg;
}

inline Curve resolve_curve(const json& spec, const Group& g) {
  const std::string s = spec.get<std::string>();
  for (const auto& f : fixtures::curves()) {
    if (f.name != s) continue;
    if (f.group != g.name())
      throw ConfigError("curve '" + s + "' is defined in group '" + f.group + "', not '" + g.name() + "'");
    return f.curve();
  }
  Curve c = io::curve_from_json(io::read_json_file(s), s);
  if (c.position(c.a()).size() != g.dimension()) throw ConfigError("curve file dimension does not match the group");
  return c;
}

namespace detail {

inline json intervals_to_json(const std::vector<Interval>& set) {
  json out = json::array();
  for (const auto& I : set) out.push_back({I.lo, I.hi});
  return out;
}

inline RationalPoint random_rational(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> num(-20, 20), den(1, 12);
  RationalPoint p;
  for (int i = 0; i < n; ++i) p.emplace_back(num(rng), den(rng));
  return p;
}

inline json schedule_to_json(const CoverSchedule& s) {
  return {{"q", s.q},           {"deltas", s.deltas}, {"values", s.values}, {"balls", s.ball_counts},
          {"last", s.last}, {"extrapolated", s.extrapolated}, {"order", s.order}};
}

inline json slope_json(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

}  // namespace detail

/// Executes one experiment. The report embeds the resolved config, so equal
/// configs (including seeds) give byte-identical reports on the same build.
inline json run(const ExperimentConfig& cfg) {
  GroupPtr group;
  try {
    group = make_group(cfg.group_spec);
  } catch (const ConfigError&) {
    throw;
  }
  const HomogeneousDistance D(group, cfg.eps);
  const json& p = cfg.params;
  json res;
  const std::string& op = cfg.op;

  auto curve = [&]() { return resolve_curve(*cfg.curve, *group); };
  auto profile_opts = [&]() {
    return ProfileOptions{p.at("grid").get<int>(), p.at("tol_rel").get<double>()};
  };

  if (op == "group-check") {
    const auto& law = group->law();
    const int n = group->dimension();
    std::mt19937_64 rng(*cfg.seed);
    const int rs = p.at("rational_samples").get<int>();
    int assoc_exact = 0, inverse_exact = 0;
    for (int s = 0; s < rs; ++s) {
      const auto x = detail::random_rational(rng, n), y = detail::random_rational(rng, n),
                 z = detail::random_rational(rng, n);
      if (law.multiply(law.multiply(x, y), z) == law.multiply(x, law.multiply(y, z))) ++assoc_exact;
      const auto e = law.multiply(x, GroupLaw::inverse(x));
      if (std::all_of(e.begin(), e.end(), [](const Rational& v) { return v == 0; })) ++inverse_exact;
    }
    std::uniform_real_distribution<double> unif(-1, 1);
    double assoc_err = 0.0;
    const int fs = p.at("float_samples").get<int>();
    for (int s = 0; s < fs; ++s) {
      Vector x(n), y(n), z(n);
      for (int i = 0; i < n; ++i) x[i] = unif(rng), y[i] = unif(rng), z[i] = unif(rng);
      assoc_err = std::max(assoc_err, (law.multiply(law.multiply(x, y), z) - law.multiply(x, law.multiply(y, z))).cwiseAbs().maxCoeff());
    }
    json q = json::array();
    const auto names = law.variable_names();
    for (int i = 0; i < n; ++i) q.push_back(law.Q(i).to_string(names));
    res = {{"algebra", io::algebra_to_json(group->algebra())},
           {"valid", true},
           {"Q", q},
           {"associativity_exact", assoc_exact},
           {"inverse_exact", inverse_exact},
           {"rational_samples", rs},
           {"associativity_max_float_error", assoc_err},
           {"float_samples", fs},
           {"pass", assoc_exact == rs && inverse_exact == rs && assoc_err < 1e-12}};
  } else if (op == "frame-show") {
    res = {{"degrees", group->degrees()}, {"coefficients", group->frame().describe()}};
  } else if (op == "metric-audit") {
    const auto audit = triangle_audit(D, p.at("samples").get<std::size_t>(), *cfg.seed);
    res = {{"max_ratio", audit.max_ratio},
           {"samples", audit.samples},
           {"witness", {io::vector_to_json(audit.witness[0]), io::vector_to_json(audit.witness[1]),
                        io::vector_to_json(audit.witness[2])}},
           {"violation", audit.violated()}};
  } else if (op == "ball-box") {
    const auto bb = ball_box_constants(D, p.at("resolution").get<std::size_t>(), *cfg.seed);
    res = {{"lambda", bb.lambda},
           {"inner_max_norm", bb.inner_max_norm},
           {"inner_witness", io::vector_to_json(bb.inner_witness)},
           {"outer_max_box", bb.outer_max_box},
           {"outer_witness", io::vector_to_json(bb.outer_witness)}};
  } else if (op == "curve-degree") {
    const Curve c = curve();
    const auto prof = curve_degree(c, group->frame(), p.at("grid").get<int>(), p.at("tol_rel").get<double>());
    res = {{"curve_degree", prof.curve_degree},
           {"exponents", prof.exponents},
           {"low_degree_set", detail::intervals_to_json(prof.low_degree_set)},
           {"t", prof.t},
           {"degree", prof.degree}};
  } else if (op == "little-o") {
    const Curve c = curve();
    const auto po = profile_opts();
    const auto prof = curve_degree(c, group->frame(), po.grid_points, po.tol_rel);
    LittleOOptions lo{p.at("h0").get<double>(), p.at("levels").get<int>(), p.at("margin").get<double>()};
    const auto rep = little_o_check(c, group, p.at("t0").get<double>(), prof.curve_degree, std::nullopt, lo, po.tol_rel);
    json coords = json::array();
    for (const auto& cs : rep.coordinates)
      coords.push_back({{"index", cs.index + 1},
                        {"slope", detail::slope_json(cs.slope)},
                        {"target", cs.target},
                        {"vacuous", cs.vacuous},
                        {"distinguished", cs.distinguished},
                        {"passes", cs.passes}});
    res = {{"case", rep.kind == LittleOCase::MaxDegree ? "max_degree" : "low_degree"},
           {"curve_degree", rep.curve_degree},
           {"pointwise_degree", rep.pointwise_degree},
           {"radii", rep.radii},
           {"coordinates", coords},
           {"pass", rep.all_pass}};
  } else if (op == "blowup") {
    const Curve c = curve();
    const auto rep = blowup_sequence(c, D, p.at("t0").get<double>(), parse_schedule(p.at("radii"), "radii"),
                                     parse_metric(p.at("metric").get<std::string>()), profile_opts());
    res = {{"q", rep.q},         {"t0", rep.t0},         {"radii", rep.radii},         {"ratios", rep.ratios},
           {"theta", rep.theta}, {"tau_norm", rep.tau_norm}, {"predicted", rep.predicted},
           {"diagnostic", rep.diagnostic}, {"truncated", rep.truncated}};
  } else if (op == "diverge") {
    const Curve c = curve();
    const auto rep = density_divergence(c, D, p.at("t0").get<double>(), parse_schedule(p.at("radii"), "radii"),
                                        p.at("margin").get<double>(), profile_opts());
    res = {{"q", rep.q},         {"t0", rep.t0},       {"radii", rep.radii},
           {"ratios", rep.ratios}, {"slope", rep.slope}, {"divergent", rep.divergent}};
  } else if (op == "cover") {
    const Curve c = curve();
    double q = 0;
    if (p.at("q").is_null()) {
      q = curve_degree(c, group->frame()).curve_degree;
    } else {
      q = p.at("q").get<double>();
    }
    res = detail::schedule_to_json(cover_schedule(c, D, q, parse_schedule(p.at("deltas"), "deltas")));
  } else if (op == "area") {
    const Curve c = curve();
    AreaFormulaOptions ao;
    ao.delta0 = p.at("delta0").get<double>();
    ao.levels = p.at("levels").get<int>();
    ao.profile = profile_opts();
    const auto rep = area_formula_residual(c, D, parse_metric(p.at("metric").get<std::string>()), ao);
    res = {{"q", rep.q},
           {"c_q", rep.c_q},
           {"cover", detail::schedule_to_json(rep.cover)},
           {"lhs", rep.lhs},
           {"rhs", rep.rhs},
           {"residual", rep.residual},
           {"low_degree_length", rep.low_degree_length},
           {"low_degree_warning", rep.low_degree_warning}};
  } else if (op == "negligibility") {
    const Curve c = curve();
    const auto rep = negligibility_estimate(c, D, parse_schedule(p.at("deltas"), "deltas"), profile_opts());
    res = {{"q", rep.q},
           {"low_degree_set", detail::intervals_to_json(rep.low_degree_set)},
           {"cover", detail::schedule_to_json(rep.cover)},
           {"halving_ratios", rep.halving_ratios},
           {"decreasing", rep.decreasing}};
  } else if (op == "federer") {
    const Curve c = curve();
    std::vector<Interval> Z;
    if (p.at("Z").is_null()) {
      Z = {c.domain()};
    } else {
      for (const auto& iv : p.at("Z")) {
        if (!iv.is_array() || iv.size() != 2) throw ConfigError("Z must be a list of [lo, hi] pairs");
        Z.push_back({iv[0].get<double>(), iv[1].get<double>()});
      }
    }
    if (p.at("a").is_null()) throw ConfigError("federer needs the exponent 'a'");
    FedererOptions fo;
    fo.radii = parse_schedule(p.at("radii"), "radii");
    const auto v = federer_density_check(c, D, Z, p.at("a").get<double>(), p.at("kappa").get<double>(), fo);
    res = {{"vacuous", v.vacuous},
           {"sample_params", v.sample_params},
           {"min_upper_density", v.vacuous ? json(nullptr) : json(v.min_upper_density)},
           {"density_bound_holds", v.density_bound_holds},
           {"mu_Z", v.mu_Z},
           {"s_upper", v.s_upper},
           {"inequality_holds", v.inequality_holds},
           {"divergent", v.divergent},
           {"s_upper_schedule", v.s_upper_schedule},
           {"shrinking", v.shrinking},
           {"pass", v.pass}};
  }
  return {{"schema", kSchemaVersion},
          {"library", "carnot"},
          {"version", kVersion},
          {"config", cfg.resolved},
          {"status", "ok"},
          {"results", res}};
}

inline json run(const json& doc) { return run(resolve_config(doc)); }

/// Plot-ready CSV of the main series of a report.
inline std::string to_csv(const json& report) {
  std::ostringstream out;
  out.precision(17);
  const std::string op = report.at("config").at("op").get<std::string>();
  const json& r = report.at("results");
  auto columns = [&](const std::vector<std::string>& names, const std::vector<const json*>& cols) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\n";
    const std::size_t rows = cols.front()->size();
    for (std::size_t k = 0; k < rows; ++k) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const json& v = (*cols[i])[k];
        out << (i ? "," : "");
        if (v.is_number_float()) {
          out << v.get<double>();
        } else {
          out << v.dump();
        }
      }
      out << "\n";
    }
  };
  if (op == "blowup" || op == "diverge") {
    columns({"radius", "ratio"}, {&r.at("radii"), &r.at("ratios")});
  } else if (op == "cover") {
    columns({"delta", "value", "balls"}, {&r.at("deltas"), &r.at("values"), &r.at("balls")});
  } else if (op == "area" || op == "negligibility") {
    const json& c = r.at("cover");
    columns({"delta", "value", "balls"}, {&c.at("deltas"), &c.at("values"), &c.at("balls")});
  } else if (op == "curve-degree") {
    columns({"t", "degree"}, {&r.at("t"), &r.at("degree")});
  } else if (op == "little-o") {
    out << "index,slope,target,passes\n";
    for (const auto& c : r.at("coordinates"))
      out << c.at("index").get<int>() << "," << c.at("slope").dump() << "," << c.at("target").get<double>() << ","
          << (c.at("passes").get<bool>() ? "true" : "false") << "\n";
  } else {
    out << "key,value\n";
    for (const auto& [k, v] : r.items())
      if (v.is_primitive()) out << k << "," << v.dump() << "\n";
  }
  return out.str();
}

/// Exit status for an error category.
inline int exit_code(const std::string& category) {
  if (category == "ConfigError") return 2;
  if (category == "GroupValidationError") return 3;
  if (category == "NumericalResolutionError") return 4;
  if (category == "PreconditionError") return 5;
  return 1;
}

inline json catalog() {
  json groups = json::array(), curves = json::array(), distances = json::array(), ops = json::array();
  for (const auto& [name, desc] : algebras::catalog()) groups.push_back({{"name", name}, {"description", desc}});
  for (const auto& f : fixtures::curves())
    curves.push_back({{"name", f.name}, {"group", f.group}, {"description", f.description}});
  distances.push_back({{"name", "layer_max"},
                       {"description", "N(z) = max_k eps_k |z^(k)|^(1/k), default eps_k = 1 for every built-in group"}});
  for (const auto& o : operations()) ops.push_back({{"name", o.name}, {"description", o.description}});
  return {{"groups", groups}, {"curves", curves}, {"distances", distances}, {"ops", ops}};
}

}  // namespace carnot::experiment
