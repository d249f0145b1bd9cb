// sasdp: batch CLI over the SaS privacy library. Every command writes its
// outputs atomically together with a run manifest (command, full parameter
// set, seed, artifact version, output digests); `rerun` replays a manifest
// and reproduces the outputs byte for byte.
//
// Exit codes: 0 success, 1 numeric/search failure, 2 usage or input parse
// error. A validate run with failing checks exits 1.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sasdp/detail/sha256.hpp"
#include "sasdp/mechanisms.hpp"
#include "sasdp/privacy.hpp"
#include "sasdp/queries.hpp"
#include "sasdp/random.hpp"
#include "sasdp/stable.hpp"
#include "sasdp/validation.hpp"
#include "sasdp/version.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 8;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing '" + tmp + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("failed to parse JSON from '" + path + "': " + e.what());
  }
}

sasdp::EvalConfig eval_config_from(const json& params) {
  sasdp::EvalConfig cfg;
  cfg.abs_tol = params.at("tol_abs").get<double>();
  cfg.rel_tol = params.at("tol_rel").get<double>();
  cfg.validate();
  return cfg;
}

// Writes the listed (path, content) outputs plus the manifest beside the
// primary output, then prints a one-line summary.
void emit_outputs(const std::string& command, const json& params,
                  const std::vector<std::pair<std::string, std::string>>& files) {
  json manifest;
  manifest["artifact_version"] = sasdp::kVersion;
  manifest["command"] = command;
  manifest["parameters"] = params;
  manifest["seed"] = params.contains("seed") ? params.at("seed").get<std::uint64_t>()
                                             : kDefaultSeed;
  manifest["substream"] =
      params.contains("substream") ? params.at("substream").get<std::uint64_t>() : 0;
  json outs = json::array();
  for (const auto& [path, content] : files) {
    write_file_atomic(path, content);
    outs.push_back({{"path", path}, {"sha256", sasdp::detail::sha256_hex(content)}});
  }
  manifest["outputs"] = outs;
  const std::string manifest_path = params.at("out").get<std::string>() + ".manifest.json";
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  std::cout << command << ": wrote";
  for (const auto& [path, content] : files) std::cout << " " << path;
  std::cout << " (+ " << manifest_path << ")\n";
}

// ---------------------------------------------------------------------------
// density: tabulate the SaS pdf on a uniform grid.

void run_density(const json& params) {
  const sasdp::StableParams sp{params.at("alpha").get<double>(),
                               params.at("gamma").get<double>(),
                               params.at("mu").get<double>()};
  sp.validate();
  const double x_min = params.at("x_min").get<double>();
  const double x_max = params.at("x_max").get<double>();
  const int steps = params.at("steps").get<int>();
  if (!(x_min < x_max)) throw UsageError("density: requires x_min < x_max");
  if (steps < 2) throw UsageError("density: requires steps >= 2");
  const sasdp::EvalConfig cfg = eval_config_from(params);

  std::string csv = "x,pdf\n";
  for (int i = 0; i < steps; ++i) {
    const double x =
        x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    csv += format_g17(x) + "," + format_g17(sasdp::density(x, sp, cfg)) + "\n";
  }
  emit_outputs("density", params, {{params.at("out").get<std::string>(), csv}});
}

// ---------------------------------------------------------------------------
// privatize: evaluate a bounded query on a CSV dataset and release it through
// a mechanism.

sasdp::BoundedQuery parse_query(const json& q, double n_max) {
  if (!q.is_object() || !q.contains("kind") || !q.at("kind").is_string()) {
    throw UsageError("query spec: expected object with string 'kind'");
  }
  const std::string kind = q.at("kind").get<std::string>();
  auto expect_keys = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : q.items()) {
      bool known = key == "kind";
      for (const char* k : keys) known = known || key == k;
      if (!known) throw UsageError("query spec: unexpected field '" + key + "'");
    }
    for (const char* k : keys) {
      if (!q.contains(k)) {
        throw UsageError("query spec: kind '" + kind + "' requires field '" +
                         std::string(k) + "'");
      }
    }
  };
  if (kind == "count") {
    expect_keys({});
    return sasdp::BoundedQuery::count(n_max);
  }
  if (kind == "clipped_mean") {
    expect_keys({"field", "lower", "upper"});
    return sasdp::BoundedQuery::clipped_mean(q.at("field").get<std::string>(),
                                             q.at("lower").get<double>(),
                                             q.at("upper").get<double>());
  }
  if (kind == "histogram") {
    expect_keys({"field", "edges"});
    return sasdp::BoundedQuery::histogram(q.at("field").get<std::string>(),
                                          q.at("edges").get<std::vector<double>>());
  }
  throw UsageError("query spec: unknown kind '" + kind + "'");
}

void run_privatize(const json& params) {
  const sasdp::Dataset ds = sasdp::read_csv_file(params.at("data").get<std::string>());
  const json query_spec = params.at("query_spec");
  const sasdp::BoundedQuery query =
      parse_query(query_spec, params.at("n_max").get<double>());
  sasdp::MechanismSpec mech;
  try {
    mech = params.at("mechanism_spec").get<sasdp::MechanismSpec>();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const bool retain = params.at("debug_retain_clean").get<bool>();

  const sasdp::QueryResult qr = sasdp::evaluate(ds, query);
  sasdp::RandomStream stream(params.at("seed").get<std::uint64_t>(),
                             params.at("substream").get<std::uint64_t>());
  const sasdp::MechanismOutput out = sasdp::apply(qr.values, mech, stream, retain);

  json doc;
  doc["query_values_released"] = out.values;
  doc["mechanism"] = mech;
  doc["query"] = query_spec;
  doc["seed"] = out.seed_used;
  doc["substream"] = out.substream_used;
  doc["lower_bounds"] = qr.lower_bounds;
  doc["upper_bounds"] = qr.upper_bounds;
  const std::string out_path = params.at("out").get<std::string>();
  doc["manifest"] = out_path + ".manifest.json";
  if (retain) doc["clean_values"] = out.clean_values;
  emit_outputs("privatize", params, {{out_path, doc.dump(2) + "\n"}});
}

// ---------------------------------------------------------------------------
// epsilon: numerical budget estimate plus the sampled loss curve.

void run_epsilon(const json& params) {
  const double alpha = params.at("alpha").get<double>();
  const double gamma = params.at("gamma").get<double>();
  const double sensitivity = params.at("sensitivity").get<double>();
  const sasdp::EvalConfig cfg = eval_config_from(params);
  const auto report = sasdp::estimate_epsilon(
      alpha, gamma, sensitivity, sasdp::SearchConfig::defaults(gamma, sensitivity), cfg);

  const std::string out_path = params.at("out").get<std::string>();
  const std::string curve_path = params.at("curve_out").get<std::string>();

  json doc;
  doc["alpha"] = alpha;
  doc["gamma"] = gamma;
  doc["sensitivity"] = sensitivity;
  if (report.unbounded()) {
    doc["epsilon"] = "unbounded";
  } else {
    doc["epsilon"] = *report.epsilon;
    doc["argmax_x"] = *report.argmax_x;
  }
  doc["search_radius_used"] = report.search_radius_used;
  doc["loss_curve_csv"] = curve_path;

  std::string csv = "x,loss\n";
  for (const auto& [x, loss] : report.loss_curve) {
    csv += format_g17(x) + "," + format_g17(loss) + "\n";
  }
  emit_outputs("epsilon", params, {{out_path, doc.dump(2) + "\n"}, {curve_path, csv}});
}

// ---------------------------------------------------------------------------
// calibrate: from a target budget (or Wasserman-Zhou error floor) to a scale.

void run_calibrate(const json& params) {
  const double alpha = params.at("alpha").get<double>();
  const double sensitivity = params.at("sensitivity").get<double>();
  const double tol = params.at("tol").get<double>();
  const sasdp::EvalConfig cfg = eval_config_from(params);

  double epsilon = 0.0;
  if (params.contains("epsilon")) {
    epsilon = params.at("epsilon").get<double>();
    if (!(epsilon > 0.0)) throw UsageError("calibrate: epsilon must be positive");
  } else {
    const double p = params.at("p_bound").get<double>();
    const double q = params.at("q_bound").get<double>();
    if (!(p >= 0.0) || !(q >= 0.0) || !(p < 1.0) || !(q < 1.0)) {
      throw UsageError("calibrate: p_bound and q_bound must lie in [0, 1)");
    }
    if (p + q >= 1.0) {
      throw UsageError(
          "calibrate: p_bound + q_bound >= 1 places no constraint on epsilon; "
          "refusing to calibrate");
    }
    epsilon = std::log(2.0 / (p + q) - 1.0);
  }

  const double gamma = sasdp::calibrate_gamma(alpha, sensitivity, epsilon, tol, cfg);
  json doc;
  doc["alpha"] = alpha;
  doc["sensitivity"] = sensitivity;
  doc["epsilon_used"] = epsilon;
  doc["gamma"] = gamma;
  if (alpha > 1.0) {
    doc["mad_analytic"] = sasdp::mad_analytic(sasdp::MechanismSpec::sas(alpha, gamma));
  } else {
    doc["mad_analytic"] = nullptr;  // E|Y| undefined at alpha = 1
  }
  emit_outputs("calibrate", params, {{params.at("out").get<std::string>(), doc.dump(2) + "\n"}});
}

// ---------------------------------------------------------------------------
// validate: run one statistical suite and report per-check results.

int run_validate(const json& params) {
  const std::string suite = params.at("suite").get<std::string>();
  const std::uint64_t seed = params.at("seed").get<std::uint64_t>();
  sasdp::SuiteReport report;
  try {
    report = sasdp::run_suite(suite, seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  json doc;
  doc["suite"] = report.suite;
  doc["seed"] = report.seed;
  doc["all_pass"] = report.all_pass();
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"statistic", c.statistic},
                      {"threshold", c.threshold},
                      {"detail", c.detail},
                      {"seeds", c.seeds}});
  }
  doc["checks"] = checks;
  emit_outputs("validate", params, {{params.at("out").get<std::string>(), doc.dump(2) + "\n"}});
  for (const auto& c : report.checks) {
    std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail
              << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

int dispatch(const std::string& command, const json& params) {
  if (command == "density") {
    run_density(params);
  } else if (command == "privatize") {
    run_privatize(params);
  } else if (command == "epsilon") {
    run_epsilon(params);
  } else if (command == "calibrate") {
    run_calibrate(params);
  } else if (command == "validate") {
    return run_validate(params);
  } else {
    throw UsageError("unknown command '" + command + "' in manifest");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric alpha-stable privacy mechanism toolkit"};
  app.require_subcommand(1);

  // Shared flags, registered uniformly on every subcommand.
  struct Common {
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t substream = 0;
    double tol_abs = 1e-9;
    double tol_rel = 1e-6;
    std::string out;
  } common;
  auto add_common = [&common](CLI::App* cmd, bool needs_out = true) {
    cmd->add_option("--seed", common.seed, "PRNG seed")->capture_default_str();
    cmd->add_option("--substream", common.substream, "PRNG substream id")
        ->capture_default_str();
    cmd->add_option("--tol-abs", common.tol_abs, "absolute density tolerance")
        ->capture_default_str();
    cmd->add_option("--tol-rel", common.tol_rel, "relative density tolerance")
        ->capture_default_str();
    auto* out = cmd->add_option("--out", common.out, "primary output path");
    if (needs_out) out->required();
  };

  double alpha = 1.5, gamma = 1.0, mu = 0.0;
  double x_min = -5.0, x_max = 5.0;
  int steps = 101;
  auto* density_cmd = app.add_subcommand("density", "tabulate a SaS density to CSV");
  density_cmd->add_option("--alpha", alpha, "stability exponent")->required();
  density_cmd->add_option("--gamma", gamma, "scale")->required();
  density_cmd->add_option("--mu", mu, "location")->capture_default_str();
  density_cmd->add_option("--x-min", x_min, "grid start")->required();
  density_cmd->add_option("--x-max", x_max, "grid end")->required();
  density_cmd->add_option("--steps", steps, "grid points (>= 2)")->required();
  add_common(density_cmd);

  std::string data_path, query_path, mechanism_path;
  double n_max = 1e9;
  bool retain_clean = false;
  auto* priv_cmd =
      app.add_subcommand("privatize", "release a bounded query through a mechanism");
  priv_cmd->add_option("--data", data_path, "input CSV (header row required)")->required();
  priv_cmd->add_option("--query", query_path, "query spec JSON")->required();
  priv_cmd->add_option("--mechanism", mechanism_path, "mechanism spec JSON")->required();
  priv_cmd->add_option("--n-max", n_max, "population cap for COUNT bounds")
      ->capture_default_str();
  priv_cmd->add_flag("--debug-retain-clean", retain_clean,
                     "also write the unperturbed values (test/debug only)");
  add_common(priv_cmd);

  double sensitivity = 1.0;
  std::string curve_out;
  auto* eps_cmd = app.add_subcommand("epsilon", "estimate the privacy budget");
  eps_cmd->add_option("--alpha", alpha, "stability exponent")->required();
  eps_cmd->add_option("--gamma", gamma, "noise scale")->required();
  eps_cmd->add_option("--sensitivity", sensitivity, "query sensitivity")->required();
  eps_cmd->add_option("--curve-out", curve_out, "loss curve CSV path (default <out>.loss.csv)");
  add_common(eps_cmd);

  double target_epsilon = 0.0, p_bound = 0.0, q_bound = 0.0, cal_tol = 1e-6;
  auto* cal_cmd = app.add_subcommand("calibrate", "solve for the scale meeting a budget");
  cal_cmd->add_option("--alpha", alpha, "stability exponent in [1, 2)")->required();
  cal_cmd->add_option("--sensitivity", sensitivity, "query sensitivity")->required();
  auto* eps_opt = cal_cmd->add_option("--epsilon", target_epsilon, "target budget");
  auto* p_opt = cal_cmd->add_option("--p-bound", p_bound, "false positive floor");
  auto* q_opt = cal_cmd->add_option("--q-bound", q_bound, "false negative floor");
  cal_cmd->add_option("--tol", cal_tol, "budget tolerance of the inversion")
      ->capture_default_str();
  add_common(cal_cmd);

  std::string suite;
  auto* val_cmd = app.add_subcommand("validate", "run a statistical validation suite");
  val_cmd->add_option("--suite", suite, "one of sampler|closure|mad|privacy")->required();
  add_common(val_cmd);

  std::string manifest_path;
  auto* rerun_cmd = app.add_subcommand("rerun", "replay a command from its run manifest");
  rerun_cmd->add_option("--manifest", manifest_path, "manifest JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Phase 1 (input parsing and validation) exits 2; phase 2 (computation and
  // output) exits 1.
  json params;
  std::string command;
  try {
    params["seed"] = common.seed;
    params["substream"] = common.substream;
    params["tol_abs"] = common.tol_abs;
    params["tol_rel"] = common.tol_rel;
    params["out"] = common.out;
    if (density_cmd->parsed()) {
      command = "density";
      params["alpha"] = alpha;
      params["gamma"] = gamma;
      params["mu"] = mu;
      params["x_min"] = x_min;
      params["x_max"] = x_max;
      params["steps"] = steps;
      if (!(x_min < x_max)) throw UsageError("density: requires x_min < x_max");
      if (steps < 2) throw UsageError("density: requires steps >= 2");
      sasdp::StableParams{alpha, gamma, mu}.validate();
    } else if (priv_cmd->parsed()) {
      command = "privatize";
      params["data"] = data_path;
      params["n_max"] = n_max;
      params["debug_retain_clean"] = retain_clean;
      params["query_spec"] = load_json_file(query_path);
      params["mechanism_spec"] = load_json_file(mechanism_path);
      // validate both specs before running
      parse_query(params["query_spec"], n_max);
      params["mechanism_spec"].get<sasdp::MechanismSpec>();
      sasdp::read_csv_file(data_path);
    } else if (eps_cmd->parsed()) {
      command = "epsilon";
      params["alpha"] = alpha;
      params["gamma"] = gamma;
      params["sensitivity"] = sensitivity;
      params["curve_out"] = curve_out.empty() ? common.out + ".loss.csv" : curve_out;
      sasdp::StableParams{alpha, gamma, 0.0}.validate();
      if (!(sensitivity > 0.0)) throw UsageError("epsilon: sensitivity must be positive");
    } else if (cal_cmd->parsed()) {
      command = "calibrate";
      params["alpha"] = alpha;
      params["sensitivity"] = sensitivity;
      params["tol"] = cal_tol;
      if (*eps_opt) {
        if (*p_opt || *q_opt) {
          throw UsageError("calibrate: give either --epsilon or --p-bound/--q-bound");
        }
        params["epsilon"] = target_epsilon;
        if (!(target_epsilon > 0.0)) {
          throw UsageError("calibrate: epsilon must be positive");
        }
      } else if (*p_opt && *q_opt) {
        params["p_bound"] = p_bound;
        params["q_bound"] = q_bound;
        if (!(p_bound >= 0.0) || !(q_bound >= 0.0) || !(p_bound < 1.0) ||
            !(q_bound < 1.0)) {
          throw UsageError("calibrate: p_bound and q_bound must lie in [0, 1)");
        }
        if (p_bound + q_bound >= 1.0) {
          throw UsageError(
              "calibrate: p_bound + q_bound >= 1 places no constraint on epsilon; "
              "refusing to calibrate");
        }
      } else {
        throw UsageError("calibrate: give either --epsilon or both --p-bound and --q-bound");
      }
      if (!(alpha >= 1.0) || !(alpha < 2.0)) {
        throw UsageError("calibrate: alpha must lie in [1, 2)");
      }
      if (!(sensitivity > 0.0)) throw UsageError("calibrate: sensitivity must be positive");
    } else if (val_cmd->parsed()) {
      command = "validate";
      params["suite"] = suite;
      if (suite != "sampler" && suite != "closure" && suite != "mad" && suite != "privacy") {
        throw UsageError("validate: unknown suite '" + suite + "'");
      }
    } else if (rerun_cmd->parsed()) {
      const json manifest = load_json_file(manifest_path);
      if (!manifest.contains("command") || !manifest.contains("parameters")) {
        throw UsageError("rerun: manifest missing 'command' or 'parameters'");
      }
      command = manifest.at("command").get<std::string>();
      params = manifest.at("parameters");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return dispatch(command, params);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
