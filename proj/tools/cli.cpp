#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "biphoton/beamsplitter.hpp"
#include "biphoton/entanglement.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/shape_json.hpp"
#include "biphoton/shaping.hpp"

namespace biphoton::cli {
namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Number, Integer, Text, Shape, NumberList, Document };

struct OptionSpec {
  std::string flag;  // long form, e.g. "--t-sq"
  std::string key;   // RunConfig key
  Kind kind;
  json fallback;     // null: no default
  std::string help;
  bool required = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline JSON or @file.
json read_json_arg(const std::string& arg, const std::string& what) {
  const std::string text = (!arg.empty() && arg.front() == '@') ? read_file(arg.substr(1)) : arg;
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(what + " is not valid JSON: " + e.what());
  }
}

json convert(const OptionSpec& spec, const std::string& raw) {
  const std::string what = spec.flag;
  switch (spec.kind) {
    case Kind::Number: {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || !std::isfinite(v)) throw UsageError(what + " expects a number, got '" + raw + "'");
      return v;
    }
    case Kind::Integer: {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || raw.front() == '-') throw UsageError(what + " expects a non-negative integer");
      return v;
    }
    case Kind::Text:
      return raw;
    case Kind::Shape:
    case Kind::Document:
      return read_json_arg(raw, what);
    case Kind::NumberList: {
      json list = json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(convert({what, spec.key, Kind::Number, nullptr, ""}, item));
      if (list.empty()) throw UsageError(what + " expects a comma-separated list of numbers");
      return list;
    }
  }
  return nullptr;
}

void check_type(const OptionSpec& spec, const json& v) {
  if (v.is_null()) return;
  bool ok = true;
  switch (spec.kind) {
    case Kind::Number: ok = v.is_number(); break;
    case Kind::Integer: ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); break;
    case Kind::Text: ok = v.is_string(); break;
    case Kind::Shape: ok = v.is_object(); break;
    case Kind::Document: ok = v.is_object(); break;
    case Kind::NumberList: ok = v.is_array(); break;
  }
  if (!ok) throw UsageError("config value for '" + spec.key + "' has the wrong type");
}

// ---------------------------------------------------------------------------

struct Context {
  json config;
  std::ostream& out;
  std::vector<std::string> warnings;

  double number(const std::string& key) const { return config.at(key).get<double>(); }
  std::size_t integer(const std::string& key) const { return config.at(key).get<std::size_t>(); }
  std::string text(const std::string& key) const { return config.at(key).get<std::string>(); }
  bool has(const std::string& key) const { return config.contains(key) && !config.at(key).is_null(); }
};

std::vector<OptionSpec> grid_options() {
  return {{"--grid-min", "grid_min", Kind::Number, -10.0, "time window start"},
          {"--grid-max", "grid_max", Kind::Number, 30.0, "time window end"},
          {"--grid-points", "grid_points", Kind::Integer, 2001, "number of grid nodes"}};
}

std::vector<OptionSpec> pair_options() {
  return {{"--shape1", "shape1", Kind::Shape, nullptr, "photon in port 1: shape JSON or @file", true},
          {"--shape2", "shape2", Kind::Shape, nullptr, "photon in port 2: shape JSON or @file", true},
          {"--t-sq", "t_sq", Kind::Number, 0.5, "beam splitter transmission t^2 in [0, 1]"}};
}

TimeGrid grid_of(const Context& ctx) {
  const std::size_t n = ctx.integer("grid_points");
  try {
    return TimeGrid(ctx.number("grid_min"), ctx.number("grid_max"), n);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

BeamSplitter splitter_of(const Context& ctx) {
  const double t_sq = ctx.number("t_sq");
  if (!(t_sq >= 0.0 && t_sq <= 1.0)) throw UsageError(fmt::format("--t-sq must lie in [0, 1], got {}", t_sq));
  return BeamSplitter::from_t_sq(t_sq);
}

TemporalShape shape_of(const Context& ctx, const std::string& key) {
  try {
    return shape_from_json(ctx.config.at(key));
  } catch (const InvalidArgument& e) {
    throw UsageError(key + ": " + e.what());
  }
}

Outcome outcome_of(const Context& ctx) {
  try {
    return outcome_from_name(ctx.text("outcome"));
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::string format_of(const Context& ctx) {
  const std::string f = ctx.text("format");
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

void note_coverage(Context& ctx, const TemporalShape& shape, const TimeGrid& grid, const std::string& name) {
  const Sampling s = sample(shape, grid);
  if (s.low_coverage())
    ctx.warnings.push_back(fmt::format("{} keeps only {:.9f} of its norm inside the grid", name, s.captured_norm));
}

json document(const Context& ctx, json data) {
  json doc{{"config", ctx.config}, {"data", std::move(data)}};
  if (!ctx.warnings.empty()) doc["warnings"] = ctx.warnings;
  return doc;
}

void write_text(const Context& ctx, const std::string& text) {
  if (ctx.has("out")) {
    const std::string path = ctx.text("out");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << text;
    if (!f) throw IoError("write to '" + path + "' failed");
  } else {
    ctx.out << text;
  }
}

void write_sidecar(const std::string& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << doc.dump(2) << '\n';
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

// ---------------------------------------------------------------------------

void cmd_probs(Context& ctx) {
  const TimeGrid grid = grid_of(ctx);
  const BeamSplitter bs = splitter_of(ctx);
  const TemporalShape f1 = shape_of(ctx, "shape1"), f2 = shape_of(ctx, "shape2");
  note_coverage(ctx, f1, grid, "shape1");
  note_coverage(ctx, f2, grid, "shape2");
  const cplx J = overlap_J(f1, f2, grid);
  const OutcomeProbabilities p = outcome_probabilities(std::abs(J), bs);
  if (format_of(ctx) == "csv") {
    write_text(ctx, "J_abs,J_re,J_im,P20,P11,P02\n" + num(std::abs(J)) + "," + num(J.real()) + "," + num(J.imag()) +
                        "," + num(p.p20) + "," + num(p.p11) + "," + num(p.p02) + "\n");
    return;
  }
  write_text(ctx, document(ctx, {{"J_abs", std::abs(J)},
                                 {"J_re", J.real()},
                                 {"J_im", J.imag()},
                                 {"P20", p.p20},
                                 {"P11", p.p11},
                                 {"P02", p.p02}})
                          .dump(2) +
                      "\n");
}

void cmd_entropy_surface(Context& ctx) {
  if (!ctx.has("out")) throw UsageError("--out is required");
  const Outcome outcome = outcome_of(ctx);
  const std::size_t res = ctx.integer("resolution");
  const std::size_t nj = ctx.has("j_points") ? ctx.integer("j_points") : res;
  const std::size_t nt = ctx.has("t_points") ? ctx.integer("t_points") : res;
  if (nj == 0 || nt == 0) throw UsageError("surface resolution must be >= 1");
  std::vector<SurfaceCell> cells;
  try {
    cells = entropy_surface(outcome, {ctx.number("j_min"), ctx.number("j_max")},
                            {ctx.number("t_min"), ctx.number("t_max")}, nj, nt);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  write_surface_csv(cells, outcome, csv);
  const std::string path = ctx.text("out");
  write_text(ctx, csv.str());
  const json meta = document(ctx, {{"rows", cells.size()}, {"J_points", nj}, {"t_points", nt}});
  write_sidecar(path + ".meta.json", meta);
  ctx.out << meta.dump(2) << '\n';
}

void cmd_joint(Context& ctx) {
  if (!ctx.has("out")) throw UsageError("--out is required");
  const TimeGrid grid = grid_of(ctx);
  const BeamSplitter bs = splitter_of(ctx);
  const Outcome outcome = outcome_of(ctx);
  const TemporalShape f1 = shape_of(ctx, "shape1"), f2 = shape_of(ctx, "shape2");
  note_coverage(ctx, f1, grid, "shape1");
  note_coverage(ctx, f2, grid, "shape2");
  const TwoPhotonAmplitude amp = joint_amplitude(f1, f2, bs, outcome, grid);
  const std::string path = ctx.text("out");
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    write_amplitude_csv(amp, f);
    if (!f) throw IoError("write to '" + path + "' failed");
  }
  json data = amplitude_metadata(amp);
  data["rows"] = amp.size() * amp.size();
  const json meta = document(ctx, std::move(data));
  write_sidecar(path + ".meta.json", meta);
  ctx.out << meta.dump(2) << '\n';
}

void cmd_herald(Context& ctx) {
  const TimeGrid grid = grid_of(ctx);
  const BeamSplitter bs = splitter_of(ctx);
  const Outcome outcome = outcome_of(ctx);
  if (outcome == Outcome::Out02) throw UsageError("heralding uses outcome 11 or 20");
  const TemporalShape f1 = shape_of(ctx, "shape1"), f2 = shape_of(ctx, "shape2");
  std::optional<TemporalShape> target;
  if (ctx.has("target")) target = shape_of(ctx, "target");
  note_coverage(ctx, f1, grid, "shape1");
  note_coverage(ctx, f2, grid, "shape2");
  if (target) note_coverage(ctx, *target, grid, "target");

  const double t_dec = ctx.number("t_dec"), t_r = ctx.number("t_r");
  if (t_r < 0.0) throw UsageError("--t-r must be >= 0");
  const HeraldResult h = herald_windowed(f1, f2, bs, {outcome, t_dec, t_r}, grid, target);

  json data;
  if (h.success_density) data["success_density"] = *h.success_density;
  if (h.success_probability) {
    data["success_probability"] = *h.success_probability;
    data["ensemble_size"] = h.ensemble.size();
  }
  if (h.fidelity) data["fidelity"] = *h.fidelity;
  data["shape"] = shape_to_json(h.shape);

  json sweep = json::array();
  if (ctx.has("t_r_sweep")) {
    for (const json& v : ctx.config.at("t_r_sweep")) {
      const double tr = v.get<double>();
      if (tr < 0.0) throw UsageError("--t-r-sweep values must be >= 0");
      const HeraldResult s = herald_windowed(f1, f2, bs, {outcome, t_dec, tr}, grid, target);
      json row{{"t_R", tr}, {"success_probability", s.success_probability.value_or(0.0)}};
      row["fidelity"] = s.fidelity ? json(*s.fidelity) : json(nullptr);
      sweep.push_back(std::move(row));
    }
    data["sweep"] = sweep;
  }

  if (format_of(ctx) == "csv") {
    std::string text;
    if (!sweep.empty()) {
      text = "t_R,success_probability,fidelity\n";
      for (const json& row : sweep)
        text += num(row["t_R"].get<double>()) + "," + num(row["success_probability"].get<double>()) + "," +
                (row["fidelity"].is_null() ? std::string() : num(row["fidelity"].get<double>())) + "\n";
    } else {
      text = "tau,re,im\n";
      const auto& values = h.shape.samples()->values;
      for (std::size_t i = 0; i < grid.size(); ++i)
        text += num(grid.at(i)) + "," + num(values[i].real()) + "," + num(values[i].imag()) + "\n";
    }
    write_text(ctx, text);
    return;
  }
  write_text(ctx, document(ctx, std::move(data)).dump(2) + "\n");
}

void cmd_optimize(Context& ctx) {
  json problem = ctx.config.at("problem");
  if (!problem.is_object() || problem.empty()) throw UsageError("problem must be a non-empty JSON object");

  ShapingProblem prob;
  try {
    if (problem.contains("target")) prob.target = shape_from_json(problem.at("target"));
    if (problem.contains("grid")) prob.grid = grid_from_json(problem.at("grid"));
    if (problem.contains("bounds")) {
      const json& b = problem.at("bounds");
      if (!b.is_object() || b.empty()) throw UsageError("problem bounds must be a non-empty object");
      prob.bounds = bounds_from_json(b);
    }
    prob.bounds.validate();
    shifted_target(prob.target, 0.0);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("problem: ") + e.what());
  }

  auto pick = [&](const std::string& key, std::uint64_t fallback) -> std::uint64_t {
    if (ctx.has(key)) return ctx.config.at(key).get<std::uint64_t>();
    if (problem.contains(key)) {
      const json& v = problem.at(key);
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw UsageError("problem " + key + " must be a non-negative integer");
      return v.get<std::uint64_t>();
    }
    return fallback;
  };
  OptimizerConfig cfg;
  cfg.budget = pick("budget", 5000);
  cfg.restarts = pick("restarts", 8);
  cfg.seed = pick("seed", 1);
  if (cfg.restarts == 0 || cfg.budget < cfg.restarts)
    throw UsageError("need restarts >= 1 and budget >= restarts");

  // Echo the fully resolved problem so the run can be replayed from the output alone.
  problem["target"] = shape_to_json(prob.target);
  problem["grid"] = grid_to_json(prob.grid);
  problem["bounds"] = bounds_to_json(prob.bounds);
  problem["budget"] = cfg.budget;
  problem["restarts"] = cfg.restarts;
  problem["seed"] = cfg.seed;
  ctx.config["problem"] = problem;
  ctx.config["budget"] = cfg.budget;
  ctx.config["restarts"] = cfg.restarts;
  ctx.config["seed"] = cfg.seed;

  const ShapingOutcome res = optimize_shaping(prob, cfg);
  json restarts = json::array();
  static constexpr const char* names[] = {"gamma1", "gamma2", "omega1", "omega2", "t", "tau0", "t_dec"};
  for (const RestartSummary& r : res.restarts) {
    json start;
    for (std::size_t k = 0; k < r.start.size(); ++k) start[names[k]] = r.start[k];
    restarts.push_back({{"start", start},
                        {"fidelity", std::isnan(r.fidelity) ? json(nullptr) : json(r.fidelity)},
                        {"evaluations", r.evaluations}});
  }
  json data{{"x_best", parameters_to_json(res.x_best)},
            {"fidelity", res.fidelity},
            {"evaluations", res.evaluations},
            {"success_density", res.herald.success_density.value_or(0.0)},
            {"restarts", restarts}};
  write_text(ctx, document(ctx, std::move(data)).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  std::string description;
  std::vector<OptionSpec> options;
  std::function<void(Context&)> handler;
};

std::vector<Command> commands() {
  auto with = [](std::vector<OptionSpec> a, const std::vector<OptionSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const OptionSpec out{"--out", "out", Kind::Text, nullptr, "output path"};
  const OptionSpec format{"--format", "format", Kind::Text, "json", "json or csv"};
  const OptionSpec outcome{"--outcome", "outcome", Kind::Text, "11", "output component: 20, 11 or 02"};

  std::vector<Command> cmds;
  cmds.push_back({"probs", "outcome probabilities and indistinguishability J",
                  with(with(pair_options(), grid_options()), {out, format}), cmd_probs});
  cmds.push_back({"entropy-surface", "Von Neumann entropy over (|J|, t^2) as CSV",
                  {outcome,
                   {"--j-min", "j_min", Kind::Number, 0.0, "smallest |J|"},
                   {"--j-max", "j_max", Kind::Number, 1.0, "largest |J|"},
                   {"--t-min", "t_min", Kind::Number, 0.0, "smallest t^2"},
                   {"--t-max", "t_max", Kind::Number, 1.0, "largest t^2"},
                   {"--resolution", "resolution", Kind::Integer, 101, "points per axis"},
                   {"--j-points", "j_points", Kind::Integer, nullptr, "points along |J| (overrides --resolution)"},
                   {"--t-points", "t_points", Kind::Integer, nullptr, "points along t^2 (overrides --resolution)"},
                   out},
                  cmd_entropy_surface});
  cmds.push_back({"joint", "joint temporal amplitude of one outcome as CSV",
                  with(with(pair_options(), grid_options()), {outcome, out}), cmd_joint});
  cmds.push_back({"herald", "heralded single-photon shape after a time-resolved detection",
                  with(with(pair_options(), grid_options()),
                       {outcome,
                        {"--t-dec", "t_dec", Kind::Number, 0.0, "detection time"},
                        {"--t-r", "t_r", Kind::Number, 0.0, "detector resolution window (0: ideal)"},
                        {"--target", "target", Kind::Shape, nullptr, "target shape for the fidelity"},
                        {"--t-r-sweep", "t_r_sweep", Kind::NumberList, nullptr, "comma-separated resolutions"},
                        out, format}),
                  cmd_herald});
  cmds.push_back({"optimize", "maximize the shaping fidelity against a target",
                  {{"--problem", "problem", Kind::Document, nullptr, "problem JSON or @file", true},
                   {"--budget", "budget", Kind::Integer, nullptr, "objective evaluations"},
                   {"--seed", "seed", Kind::Integer, nullptr, "random seed"},
                   {"--restarts", "restarts", Kind::Integer, nullptr, "independent restarts"},
                   out},
                  cmd_optimize});
  return cmds;
}

json resolve_config(const Command& cmd, CLI::App& sub, const std::map<std::string, std::string>& raw,
                    const std::string& config_path) {
  json base = json::object();
  if (!config_path.empty()) {
    json loaded = read_json_arg("@" + config_path, "--config");
    if (loaded.contains("config")) loaded = loaded.at("config");
    if (!loaded.is_object()) throw UsageError("--config must hold a JSON object");
    if (loaded.contains("command") && loaded.at("command") != cmd.name)
      throw UsageError("--config was written by '" + loaded.at("command").get<std::string>() + "'");
    base = std::move(loaded);
  }

  json config{{"command", cmd.name}};
  for (const OptionSpec& spec : cmd.options) {
    json value = spec.fallback;
    if (base.contains(spec.key)) {
      value = base.at(spec.key);
      check_type(spec, value);
    }
    if (sub.count(spec.flag) > 0) value = convert(spec, raw.at(spec.key));
    if (spec.required && value.is_null()) throw UsageError(spec.flag + " is required");
    config[spec.key] = std::move(value);
  }
  return config;
}

void report(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-photon beam-splitter interference, temporal entanglement and heralded shaping", "biphoton"};
  app.require_subcommand(1);

  const std::vector<Command> cmds = commands();
  std::vector<std::map<std::string, std::string>> raw(cmds.size());
  std::vector<std::string> config_paths(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    CLI::App* sub = app.add_subcommand(cmds[c].name, cmds[c].description);
    for (const OptionSpec& spec : cmds[c].options) sub->add_option(spec.flag, raw[c][spec.key], spec.help);
    sub->add_option("--config", config_paths[c], "replay a RunConfig (or a whole output document)");
    subs.push_back(sub);
  }

  std::vector<const char*> argv{"biphoton"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what(), kExitUsage);
    return kExitUsage;
  }

  for (std::size_t c = 0; c < cmds.size(); ++c) {
    if (!subs[c]->parsed()) continue;
    try {
      Context ctx{resolve_config(cmds[c], *subs[c], raw[c], config_paths[c]), out, {}};
      cmds[c].handler(ctx);
      return kExitOk;
    } catch (const UsageError& e) {
      report(err, "usage", e.what(), kExitUsage);
      return kExitUsage;
    } catch (const InvalidArgument& e) {
      report(err, e.kind(), e.what(), kExitUsage);
      return kExitUsage;
    } catch (const IoError& e) {
      report(err, "io", e.what(), kExitIo);
      return kExitIo;
    } catch (const Error& e) {
      report(err, e.kind(), e.what(), kExitData);
      return kExitData;
    } catch (const json::exception& e) {
      report(err, "usage", e.what(), kExitUsage);
      return kExitUsage;
    }
  }
  report(err, "usage", "no command given", kExitUsage);
  return kExitUsage;
}

}  // namespace biphoton::cli
