#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "sfm/report.hpp"
#include "sfm/trajectory_io.hpp"
#include "sfm/worker_pool.hpp"

namespace sfm::cli {

namespace {

using PopulationSetter = void (*)(PopulationSpec&, double);

const std::vector<std::pair<std::string, PopulationSetter>>& population_params() {
  static const std::vector<std::pair<std::string, PopulationSetter>> table = {
      {"f", [](PopulationSpec& p, double v) { p.f = v; }},
      {"D", [](PopulationSpec& p, double v) { p.D = v; }},
      {"p_init", [](PopulationSpec& p, double v) { p.p = v; }},
      {"M_init", [](PopulationSpec& p, double v) { p.M = v; }},
      {"E_init", [](PopulationSpec& p, double v) { p.E = v; }},
      {"E_m", [](PopulationSpec& p, double v) { p.E_m = v; }},
      {"v0", [](PopulationSpec& p, double v) { p.v0 = ValueRange(v); }},
      {"v_max", [](PopulationSpec& p, double v) { p.v_max = v; }},
      {"radius", [](PopulationSpec& p, double v) { p.radius = ValueRange(v); }},
      {"mass", [](PopulationSpec& p, double v) { p.mass = ValueRange(v); }},
      {"tau", [](PopulationSpec& p, double v) { p.tau = v; }},
  };
  return table;
}

bool has_nervousness(Variant v) { return v == Variant::Hmfv; }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

/// Maps exceptions from loading, validation and integration to exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
}

Scenario load(const CliInvocation& inv) {
  if (inv.scenario.empty()) throw std::invalid_argument("--scenario is required");
  return load_scenario(inv.scenario.string());
}

std::filesystem::path prepare_dir(const CliInvocation& inv, const Scenario& s) {
  const std::filesystem::path dir = output_dir(inv, s);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> csv_metric_names() {
  std::vector<std::string> names;
  for (const auto& [name, value] : scalar_metrics(RunSummary{})) names.push_back(name);
  return names;
}

}  // namespace

std::vector<std::string> sweep_parameters() {
  std::vector<std::string> names;
  for (const auto& [name, setter] : population_params()) names.push_back(name);
  for (const std::string& key : config_keys()) names.push_back(key);
  return names;
}

void apply_sweep_value(Scenario& s, SimulationConfig& cfg, const std::string& param, double value) {
  for (const auto& [name, setter] : population_params()) {
    if (name != param) continue;
    for (PopulationSpec& spec : s.population) setter(spec, value);
    validate_scenario(s);
    return;
  }
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), param) == keys.end())
    throw std::invalid_argument("unknown sweep parameter '" + param + "'; valid parameters: " + join(sweep_parameters()));
  set_config_value(cfg, param, value);
}

SimulationConfig resolve_config(const Scenario& s, const CliInvocation& inv) {
  SimulationConfig cfg = effective_config(s);
  if (!inv.variants.empty()) cfg.model.variant = inv.variants.front();
  if (inv.dt) cfg.dt = *inv.dt;
  if (inv.duration) cfg.duration = *inv.duration;
  if (inv.seed) cfg.seed = *inv.seed;
  cfg.workers = std::max<std::size_t>(1, inv.workers);
  cfg.validate();
  return cfg;
}

std::filesystem::path output_dir(const CliInvocation& inv, const Scenario& s) {
  if (!inv.out.empty()) return inv.out;
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = (root && *root) ? std::filesystem::path(root) : std::filesystem::path("sfm-output");
  return base / (s.name.empty() ? std::string("scenario") : s.name) / inv.subcommand;
}

RunResult execute(const Scenario& s, const SimulationConfig& cfg, const std::string& label) {
  RunResult r;
  r.log = run(build_world(s, cfg.seed), cfg);
  SummaryContext ctx{label, s.identity(), cfg.seed, has_nervousness(cfg.model.variant)};
  r.summary = summarize(r.log, ctx);
  return r;
}

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load(inv);
    const SimulationConfig cfg = resolve_config(s, inv);
    const RunResult r = execute(s, cfg, std::string(to_string(cfg.model.variant)));
    const std::filesystem::path dir = prepare_dir(inv, s);

    std::ostringstream traj;
    write_trajectory(r.log, traj, inv.verbose);
    write_file_atomic(dir / kTrajectoryFile, traj.str());
    write_file_atomic(dir / kMetricsFile, metrics_document(r.summary, cfg));
    out << "evacuated " << r.summary.evacuated << "/" << r.summary.population << " in "
        << format_float(r.summary.evacuation_time_total) << " s; wrote " << dir.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario base = load(inv);
    const std::vector<std::string> valid = sweep_parameters();
    if (std::find(valid.begin(), valid.end(), inv.sweep_param) == valid.end())
      throw std::invalid_argument("unknown sweep parameter '" + inv.sweep_param + "'; valid parameters: " + join(valid));
    if (inv.sweep_values.empty()) throw std::invalid_argument("sweep value list is empty");

    SimulationConfig cfg = resolve_config(base, inv);
    if (inv.sweep_param == "f" && inv.variants.empty()) cfg.model.variant = Variant::Familiarity;
    const std::size_t pool_size = cfg.workers;
    cfg.workers = 1;

    const std::size_t n = inv.sweep_values.size();
    std::vector<Scenario> scenarios(n, base);
    std::vector<SimulationConfig> configs(n, cfg);
    for (std::size_t k = 0; k < n; ++k) {
      apply_sweep_value(scenarios[k], configs[k], inv.sweep_param, inv.sweep_values[k]);
      configs[k].validate();
    }
    std::vector<RunSummary> summaries(n);
    run_indexed(n, pool_size, [&](std::size_t k) {
      summaries[k] = execute(scenarios[k], configs[k], std::string(to_string(configs[k].model.variant))).summary;
    });

    std::string csv = "param,value,variant,seed";
    for (const std::string& m : csv_metric_names()) csv += "," + m;
    csv += "\n";
    for (std::size_t k = 0; k < n; ++k) {
      csv += inv.sweep_param + "," + format_float(inv.sweep_values[k]) + "," + summaries[k].label + "," +
             std::to_string(configs[k].seed);
      for (const auto& [name, value] : scalar_metrics(summaries[k])) csv += "," + (value ? format_float(*value) : "NA");
      csv += "\n";
    }
    const std::filesystem::path dir = prepare_dir(inv, base);
    write_file_atomic(dir / kSweepFile, csv);
    out << csv;
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (inv.variants.size() < 2) throw std::invalid_argument("compare needs at least two variants");
    const Scenario s = load(inv);
    SimulationConfig cfg = resolve_config(s, inv);
    const std::size_t pool_size = cfg.workers;
    cfg.workers = 1;

    const std::size_t n = inv.variants.size();
    std::vector<RunResult> results(n);
    run_indexed(n, pool_size, [&](std::size_t k) {
      SimulationConfig c = cfg;
      c.model.variant = inv.variants[k];
      results[k] = execute(s, c, std::string(to_string(c.model.variant)));
    });
    std::vector<RunSummary> summaries;
    std::vector<TrajectoryLog> logs;
    for (RunResult& r : results) {
      summaries.push_back(std::move(r.summary));
      logs.push_back(std::move(r.log));
    }
    const ComparisonTable table = compare_runs(summaries, logs);
    const std::filesystem::path dir = prepare_dir(inv, s);
    write_file_atomic(dir / kComparisonFile, table.to_csv());
    write_file_atomic(dir / kComparisonWideFile, table.to_wide_csv());
    out << table.to_wide_csv();
    return static_cast<int>(kOk);
  });
}

int cmd_validate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load(inv);
    const SimulationConfig cfg = resolve_config(s, inv);
    const World w = build_world(s, cfg.seed);
    out << "ok: " << s.name << " (" << w.peds.size() << " pedestrians, " << s.env.walls.size() << " walls, "
        << s.env.exits.size() << " exits)\n";
    return static_cast<int>(kOk);
  });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Social force pedestrian simulator"};
  app.require_subcommand(1);

  CliInvocation inv;
  std::string scenario;
  std::string out_dir;
  std::vector<std::string> variant_args;
  std::string sweep_spec;
  double dt = 0.0, duration = 0.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario, "Scenario JSON file")->required();
    sub->add_option("--variant", variant_args, "original, hmfv, lkf or familiarity (comma separated or repeated)")
        ->delimiter(',');
    sub->add_option("--dt", dt, "Time step (s)");
    sub->add_option("--duration", duration, "Simulated time limit (s)");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out_dir, std::string("Output directory (default: $") + kOutputRootEnv + "/<scenario>/<command>)");
    sub->add_option("--workers", inv.workers, "Worker threads")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run one simulation; writes trajectory and metrics");
  add_common(run);
  run->add_flag("--verbose", inv.verbose, "Include per-step force components in the trajectory");
  CLI::App* sweep = app.add_subcommand("sweep", "Run once per value of one parameter");
  add_common(sweep);
  sweep->add_option("--sweep", sweep_spec, "param=v1,v2,...")->required();
  CLI::App* compare = app.add_subcommand("compare", "Run several variants on one scenario and seed");
  add_common(compare);
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario without running it");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kValidationError);
  }

  CLI::App* chosen = app.get_subcommands().front();
  inv.subcommand = chosen->get_name();
  inv.scenario = scenario;
  inv.out = out_dir;
  if (chosen->count("--dt")) inv.dt = dt;
  if (chosen->count("--duration")) inv.duration = duration;
  if (chosen->count("--seed")) inv.seed = seed;

  const int parsed = guarded(err, [&] {
    for (const std::string& v : variant_args) inv.variants.push_back(parse_variant(v));
    if (inv.subcommand == "sweep") {
      const auto eq = sweep_spec.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--sweep expects param=v1,v2,...");
      inv.sweep_param = sweep_spec.substr(0, eq);
      std::stringstream values(sweep_spec.substr(eq + 1));
      for (std::string item; std::getline(values, item, ',');) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
        inv.sweep_values.push_back(v);
      }
    }
    return static_cast<int>(kOk);
  });
  if (parsed != kOk) return parsed;

  if (inv.subcommand == "run") return cmd_run(inv, out, err);
  if (inv.subcommand == "sweep") return cmd_sweep(inv, out, err);
  if (inv.subcommand == "compare") return cmd_compare(inv, out, err);
  return cmd_validate(inv, out, err);
}

}  // namespace sfm::cli
