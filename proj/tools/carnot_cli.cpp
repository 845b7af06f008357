#include "carnot/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

using carnot::experiment::json;

namespace {

struct Common {
  std::string eps;
  std::string curve;
  std::string out;
  std::string format = "json";
  std::int64_t seed = -1;
};

void add_common(CLI::App* app, Common& c, bool with_curve) {
  app->add_option("--eps", c.eps, "layer constants, e.g. 1,0.5");
  if (with_curve) app->add_option("--curve", c.curve, "fixture name or sample file")->required();
  app->add_option("--out", c.out, "write the report here instead of stdout");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--seed", c.seed, "RNG seed");
}

json group_value(const std::string& g) {
  if (!g.empty() && g.front() == '{') return json::parse(g);
  return g;
}

json base_config(const std::string& group, const std::string& op, const Common& c) {
  json cfg = {{"schema", carnot::experiment::kSchemaVersion}, {"group", group_value(group)}, {"op", op}};
  if (!c.eps.empty()) cfg["eps"] = c.eps;
  if (!c.curve.empty()) cfg["curve"] = c.curve;
  if (!c.out.empty()) cfg["out"] = c.out;
  cfg["format"] = c.format;
  if (c.seed >= 0) cfg["seed"] = c.seed;
  cfg["params"] = json::object();
  return cfg;
}

void emit(const json& report, const std::string& format, const std::string& out) {
  const std::string text = format == "csv" ? carnot::experiment::to_csv(report) : report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw carnot::ConfigError("cannot write '" + out + "'");
  f << text;
}

int fail(const std::string& category, const std::string& message) {
  const json err = {{"status", "error"}, {"category", category}, {"message", message}};
  std::cerr << err.dump() << "\n";
  return carnot::experiment::exit_code(category);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carnot: curves, frames and spherical measure in Carnot groups"};
  app.require_subcommand(1);
  json config;
  bool listing = false;

  auto* list = app.add_subcommand("list", "list built-in groups, curves, distances and ops");
  list->callback([&] { listing = true; });

  std::string run_file;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run an experiment config file");
  run->add_option("config", run_file, "JSON config")->required();
  run->add_option("--out", run_out, "override the output path");
  run->callback([&] {
    config = carnot::io::read_json_file(run_file);
    if (!run_out.empty()) config["out"] = run_out;
  });

  std::string group;
  Common frame_c;
  auto* frame = app.add_subcommand("frame", "frame operations");
  frame->require_subcommand(1);
  auto* frame_show = frame->add_subcommand("show", "print a^l_j");
  frame_show->add_option("group", group, "group name or algebra file")->required();
  add_common(frame_show, frame_c, false);
  frame_show->callback([&] { config = base_config(group, "frame-show", frame_c); });

  auto* group_cmd = app.add_subcommand("group", "group operations");
  group_cmd->require_subcommand(1);
  Common check_c;
  check_c.seed = 1;
  std::string check_group;
  int rational_samples = 100, float_samples = 1000;
  auto* check = group_cmd->add_subcommand("check", "validate and audit the group law");
  check->add_option("group", check_group, "group name or algebra file")->required();
  check->add_option("--rational-samples", rational_samples);
  check->add_option("--float-samples", float_samples);
  add_common(check, check_c, false);
  check->callback([&] {
    config = base_config(check_group, "group-check", check_c);
    config["params"] = {{"rational_samples", rational_samples}, {"float_samples", float_samples}};
  });

  auto* metric = app.add_subcommand("metric", "metric operations");
  metric->require_subcommand(1);
  Common audit_c;
  std::string audit_group;
  std::size_t audit_samples = 100000;
  auto* audit = metric->add_subcommand("audit", "sample the triangle inequality");
  audit->add_option("group", audit_group)->required();
  audit->add_option("--samples", audit_samples);
  add_common(audit, audit_c, false);
  audit->callback([&] {
    config = base_config(audit_group, "metric-audit", audit_c);
    config["params"] = {{"samples", audit_samples}};
  });
  Common bb_c;
  std::string bb_group;
  std::size_t bb_resolution = 20000;
  auto* bb = metric->add_subcommand("ball-box", "estimate the ball-box constant");
  bb->add_option("group", bb_group)->required();
  bb->add_option("--resolution", bb_resolution);
  add_common(bb, bb_c, false);
  bb->callback([&] {
    config = base_config(bb_group, "ball-box", bb_c);
    config["params"] = {{"resolution", bb_resolution}};
  });

  auto* curve = app.add_subcommand("curve", "curve operations");
  curve->require_subcommand(1);
  Common deg_c;
  std::string deg_group;
  int grid = 2001;
  auto* degree = curve->add_subcommand("degree", "degree profile");
  degree->add_option("group", deg_group)->required();
  degree->add_option("--grid", grid);
  add_common(degree, deg_c, true);
  degree->callback([&] {
    config = base_config(deg_group, "curve-degree", deg_c);
    config["params"] = {{"grid", grid}};
  });
  Common lo_c;
  std::string lo_group;
  double lo_t0 = 0.0;
  auto* little_o = curve->add_subcommand("little-o", "coordinate decay exponents at a point");
  little_o->add_option("group", lo_group)->required();
  little_o->add_option("--t0", lo_t0);
  add_common(little_o, lo_c, true);
  little_o->callback([&] {
    config = base_config(lo_group, "little-o", lo_c);
    config["params"] = {{"t0", lo_t0}};
  });

  auto* measure = app.add_subcommand("measure", "measure experiments");
  measure->require_subcommand(1);
  struct MeasureArgs {
    Common c;
    std::string group, radii, deltas, metric;
    double t0 = 0.0;
    double q = 0.0;
  };
  static MeasureArgs margs[5];
  const char* names[5] = {"blowup", "diverge", "cover", "area", "negligibility"};
  for (int k = 0; k < 5; ++k) {
    MeasureArgs& m = margs[k];
    const std::string op = names[k];
    auto* sub = measure->add_subcommand(op, op == "blowup"          ? "blow-up ratios at a max-degree point"
                                            : op == "diverge"       ? "density divergence at a low-degree point"
                                            : op == "cover"         ? "greedy covers along a delta schedule"
                                            : op == "area"          ? "area formula residual"
                                                                    : "covers of the low-degree set");
    sub->add_option("group", m.group)->required();
    add_common(sub, m.c, true);
    if (op == "blowup" || op == "diverge") {
      sub->add_option("--t0", m.t0, "curve parameter of the point");
      sub->add_option("--radii", m.radii, "e.g. 2^-1..2^-10 or 0.5,0.25");
    }
    if (op == "cover" || op == "negligibility") sub->add_option("--deltas", m.deltas, "e.g. 2^-2..2^-10");
    if (op == "cover") sub->add_option("--q", m.q, "Hausdorff exponent (default: curve degree)");
    if (op == "blowup" || op == "area")
      sub->add_option("--metric", m.metric, "euclidean or left_invariant")
          ->check(CLI::IsMember({"euclidean", "left_invariant"}));
    sub->callback([&config, &m, op, sub] {
      config = base_config(m.group, op, m.c);
      json& p = config["params"];
      if (op == "blowup" || op == "diverge") p["t0"] = m.t0;
      if (!m.radii.empty()) p["radii"] = m.radii;
      if (!m.deltas.empty()) p["deltas"] = m.deltas;
      if (!m.metric.empty()) p["metric"] = m.metric;
      if (op == "cover" && sub->count("--q")) p["q"] = m.q;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return carnot::experiment::exit_code("ConfigError");
  } catch (const carnot::Error& e) {
    return fail(e.category(), e.what());
  } catch (const json::exception& e) {
    return fail("ConfigError", e.what());
  }

  try {
    if (listing) {
      std::cout << carnot::experiment::catalog().dump(2) << "\n";
      return 0;
    }
    const auto cfg = carnot::experiment::resolve_config(config);
    const json report = carnot::experiment::run(cfg);
    emit(report, cfg.format, cfg.out);
    return 0;
  } catch (const carnot::Error& e) {
    return fail(e.category(), e.what());
  } catch (const json::exception& e) {
    return fail("ConfigError", e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
}
