#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "climbtp/dataio.hpp"
#include "climbtp/errors.hpp"
#include "climbtp/units.hpp"
#include "json.hpp"

namespace {

using namespace climbtp;
using nlohmann::json;

// Exit codes: 0 ok, 2 config/usage, 3 simulation, 4 optimizer,
// 5 prefix too short, 6 too few trajectories after filtering.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSimulationError = 3;
constexpr int kOptimizerError = 4;
constexpr int kPrefixTooShort = 5;
constexpr int kTooFewTrajectories = 6;

constexpr std::uint64_t kDefaultSeed = 20311;  // fixed; no wall-clock seeding

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(std::stod(cur));
      cur.clear();
    }
  };
  for (char c : csv) {
    if (c == ',') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

TuningParams apply_param_overrides(TuningParams theta,
                                   const std::vector<std::string>& overrides) {
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--params entries must look like key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const double value = std::stod(kv.substr(eq + 1));
    if (key == "m") {
      theta.mass_kg = value;
    } else if (key == "dT") {
      theta.temp_offset_K = value;
    } else if (key == "v1") {
      theta.v1_kt = value;
    } else if (key == "v2") {
      theta.v2_kt = value;
    } else if (key == "mach") {
      theta.mach = value;
    } else {
      throw ConfigError("unknown parameter '" + key + "' (use m, dT, v1, v2, mach)");
    }
  }
  return theta;
}

State initial_state_of(const Trajectory& obs) {
  State s0;
  s0.t = obs.samples.front().t;
  s0.h = obs.samples.front().h;
  s0.v = obs.samples.front().v;
  return s0;
}

json fit_to_json(const FitResult& fit) {
  json j;
  j["mass_kg"] = fit.theta.mass_kg;
  j["dT_K"] = fit.theta.temp_offset_K;
  j["v1_kt"] = fit.theta.v1_kt;
  j["v2_kt"] = fit.theta.v2_kt;
  j["mach"] = fit.theta.mach;
  j["objective_fl"] = fit.objective;
  j["evals"] = fit.evals;
  if (fit.lambda_used) {
    j["lambda_used"] = *fit.lambda_used;
  } else {
    j["lambda_used"] = nullptr;
  }
  j["fell_back_to_default"] = fit.fell_back_to_default;
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed: " + path.string());
}

struct CommonArgs {
  std::string aircraft = "configs/a320_synthetic.cfg";
  std::string bounds = "configs/bounds_default.cfg";
  std::uint64_t seed = kDefaultSeed;
};

struct SimulateArgs {
  std::vector<std::string> params;
  double initial_alt_ft = 1500;
  double initial_cas_kt = 160;
  double cruise_fl = 350;
  double dt = 1.0;
  double horizon = 3600;
  std::string out;
};

struct FitArgs {
  std::string obs;
  long budget = 3000;
  int restarts = 1;
  bool no_filter = false;
  std::string out;
};

struct PredictArgs {
  std::string obs;
  double present = 0;
  double horizon = 0;  // 0 selects present + 660
  std::string online_config;
  std::string out;
  std::string report;
};

struct EvaluateArgs {
  std::string dataset;
  std::string offsets = "2,5,10,15,20";
  std::string slices = "400,500,600";
  std::string online_config;
  long budget = 3000;
  int restarts = 1;
  unsigned jobs = 0;
  std::string report;
};

struct SynthArgs {
  int n = -1;
  std::string spec;
  std::string out;
  bool seed_given = false;
};

struct SweepArgs {
  std::string masses;
  double cruise_fl = 350;
  double horizon = 1200;
  std::string out;
};

int run_simulate(const CommonArgs& common, const SimulateArgs& args) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  const TuningParams theta = apply_param_overrides(default_params(model), args.params);

  if (units::fl_to_m(args.cruise_fl) > model.ceiling_m()) {
    std::cerr << "error: requested cruise FL" << args.cruise_fl
              << " is above the aircraft ceiling (FL" << model.h_max_ft / 100.0 << ")\n";
    return kSimulationError;
  }
  State s0;
  s0.t = 0;
  s0.h = units::ft_to_m(args.initial_alt_ft);
  s0.v = cas_to_tas(units::kt_to_mps(args.initial_cas_kt), s0.h, theta.temp_offset_K);

  const SimulationOutcome sim =
      simulate(theta, s0, args.cruise_fl, args.horizon, args.dt, dyn, model);
  write_trajectory_csv(sim.trajectory, args.out);

  const char* reason = sim.termination == Termination::ReachedLevel ? "reached_level"
                       : sim.termination == Termination::Horizon    ? "horizon"
                                                                    : "ceiling";
  const std::size_t toc = top_of_climb(sim.trajectory);
  std::cout << "termination: " << reason << "\n"
            << "top_of_climb_s: " << sim.trajectory.samples[toc].t << "\n"
            << "final_alt_fl: " << units::m_to_fl(sim.trajectory.samples.back().h) << "\n"
            << "mode_switches: " << sim.mode_switch_count << "\n"
            << "clamp_incidents: " << sim.clamp_incidents << "\n";
  return kOk;
}

int run_fit(const CommonArgs& common, const FitArgs& args) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  const ParamBounds bounds = load_bounds(common.bounds);
  bounds.validate_against(model);

  const Trajectory obs = parse_trajectory_csv(std::filesystem::path(args.obs));
  if (!args.no_filter) {
    auto [kept, rejected] = filter_dataset({{args.obs, obs}});
    if (kept.empty()) {
      std::cerr << "error: observation rejected by dataset filters: " << rejected[0].reason
                << " (use --no-filter to override)\n";
      return kConfigError;
    }
  }

  CmaConfig cma;
  cma.dimension = 5;
  cma.max_evals = args.budget;
  cma.restarts = args.restarts;
  cma.seed = common.seed;

  const FitResult fit = fit_offline(obs, initial_state_of(obs), bounds, cma, dyn, model);

  json j = fit_to_json(fit);
  const std::size_t toc = top_of_climb(obs);
  j["points_fitted"] = toc + 1;
  j["mean_error_fl"] = fit.objective / static_cast<double>(toc + 1);
  write_text_file(args.out, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int run_predict(const CommonArgs& common, const PredictArgs& args) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  const ParamBounds bounds = load_bounds(common.bounds);
  bounds.validate_against(model);
  const OnlineConfig online =
      args.online_config.empty() ? OnlineConfig{} : load_online_config(args.online_config);

  const Trajectory obs = parse_trajectory_csv(std::filesystem::path(args.obs));
  Trajectory prefix;
  prefix.t0 = obs.t0;
  prefix.dt = obs.dt;
  for (const Sample& s : obs.samples) {
    if (s.t - obs.t0 <= args.present + 1e-6) prefix.samples.push_back(s);
  }
  if (prefix.samples.empty()) {
    std::cerr << "error: no observations before --present\n";
    return kPrefixTooShort;
  }

  const double horizon = args.horizon > 0 ? args.horizon : args.present + 660.0;
  CmaConfig cma;
  cma.dimension = 5;
  cma.seed = common.seed;

  const OnlinePrediction result = predict_online(prefix, initial_state_of(obs), bounds,
                                                 online, cma, horizon, dyn, model);
  write_trajectory_csv(result.prediction, args.out);

  json j = fit_to_json(result.fit);
  j["validation_error_fl"] = result.fit.objective;
  j["present_s"] = args.present;
  j["horizon_s"] = horizon;
  if (!args.report.empty()) write_text_file(args.report, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int run_evaluate(const CommonArgs& common, const EvaluateArgs& args, bool online_mode) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  const ParamBounds bounds = load_bounds(common.bounds);
  bounds.validate_against(model);

  auto [kept, rejected] = filter_dataset(load_dataset(args.dataset));
  for (const auto& r : rejected) {
    std::cerr << "filtered out " << r.id << ": " << r.reason << "\n";
  }
  if (kept.size() < 5) {
    std::cerr << "error: only " << kept.size() << " trajectories survive filtering\n";
    return kTooFewTrajectories;
  }

  CmaConfig cma;
  cma.dimension = 5;
  cma.max_evals = args.budget;
  cma.restarts = args.restarts;
  cma.seed = common.seed;

  MeteringSpec spec;
  spec.offsets_min = parse_double_list(args.offsets);

  std::vector<EvaluationReport> reports;
  if (online_mode) {
    spec.reference = MeteringSpec::Reference::CurrentTime;
    const OnlineConfig online =
        args.online_config.empty() ? OnlineConfig{} : load_online_config(args.online_config);
    reports = run_online_experiment(kept, parse_double_list(args.slices), online, bounds,
                                    cma, spec, dyn, model, args.jobs);
  } else {
    spec.reference = MeteringSpec::Reference::Takeoff;
    reports = {run_offline_experiment(kept, bounds, cma, spec, dyn, model, args.jobs)};
  }

  const std::string table = render_report_table(reports);
  std::cout << table;
  write_text_file(args.report, table);
  std::filesystem::path csv_path(args.report);
  csv_path.replace_extension(".csv");
  write_text_file(csv_path, render_report_csv(reports));
  return kOk;
}

int run_synth(const CommonArgs& common, const SynthArgs& args) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  SynthSpec spec = args.spec.empty() ? SynthSpec{} : load_synth_spec(args.spec);
  if (args.n > 0) spec.n_trajectories = args.n;
  if (args.seed_given || args.spec.empty()) spec.seed = common.seed;

  const SyntheticDataset data = generate_synthetic(spec, model, dyn);
  write_dataset(data, args.out);
  std::cout << "wrote " << data.trajectories.size() << " trajectories to " << args.out
            << "\n";
  return kOk;
}

int run_mass_sweep(const CommonArgs& common, const SweepArgs& args) {
  const AircraftPerfModel model = load_perf(common.aircraft);
  const DynamicsConfig dyn = load_dynamics(common.aircraft);
  const std::vector<double> masses = parse_double_list(args.masses);
  if (masses.empty()) throw ConfigError("--masses must list at least one mass");
  for (double m : masses) {
    if (m < model.mass_min_kg || m > model.mass_max_kg) {
      throw ConfigError("mass " + std::to_string(m) + " kg outside the aircraft range");
    }
  }

  std::string csv = "mass_kg,t_s,alt_fl\n";
  char line[96];
  for (double m : masses) {
    TuningParams theta = default_params(model);
    theta.mass_kg = m;
    State s0;
    s0.t = 0;
    s0.h = units::ft_to_m(1500);
    s0.v = cas_to_tas(units::kt_to_mps(160), s0.h, 0.0);
    const SimulationOutcome sim =
        simulate(theta, s0, args.cruise_fl, args.horizon, 1.0, dyn, model);
    const Trajectory grid = resample(sim.trajectory, 5.0);
    for (const Sample& s : grid.samples) {
      std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", m, s.t, units::m_to_fl(s.h));
      csv += line;
    }
  }
  write_text_file(args.out, csv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"climbtp: vertical-plane climb trajectory prediction and parameter tuning"};
  app.require_subcommand(1);

  if (const char* env_cfg = std::getenv("CLIMB_TP_CONFIG")) {
    app.set_config("--config", env_cfg, "Flat config file with default flag values");
  } else {
    app.set_config("--config", "", "Flat config file with default flag values");
  }

  CommonArgs common;
  app.add_option("--aircraft", common.aircraft, "Aircraft coefficient config file");
  app.add_option("--bounds", common.bounds, "Parameter bounds config file");
  auto* seed_opt = app.add_option("--seed", common.seed, "Base seed for all randomness");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate one climb trajectory");
  sim_cmd->add_option("--params", sim_args.params, "Parameter overrides, e.g. m=70000 dT=5");
  sim_cmd->add_option("--initial-alt", sim_args.initial_alt_ft, "Initial altitude, ft");
  sim_cmd->add_option("--initial-cas", sim_args.initial_cas_kt, "Initial CAS, kt");
  sim_cmd->add_option("--cruise-fl", sim_args.cruise_fl, "Level-off flight level");
  sim_cmd->add_option("--dt", sim_args.dt, "Integration step, s");
  sim_cmd->add_option("--horizon", sim_args.horizon, "Time horizon, s");
  sim_cmd->add_option("--out", sim_args.out, "Output trajectory CSV")->required();

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit parameters on a full observed climb");
  fit_cmd->add_option("--obs", fit_args.obs, "Observed trajectory CSV")->required();
  fit_cmd->add_option("--budget", fit_args.budget, "Objective evaluation budget");
  fit_cmd->add_option("--restarts", fit_args.restarts, "Optimizer restarts");
  fit_cmd->add_flag("--no-filter", fit_args.no_filter, "Skip dataset filters");
  fit_cmd->add_option("--out", fit_args.out, "Output report (JSON)")->required();

  PredictArgs pred_args;
  auto* pred_cmd = app.add_subcommand("predict", "Online prediction from a partial climb");
  pred_cmd->add_option("--obs", pred_args.obs, "Observed trajectory CSV")->required();
  pred_cmd->add_option("--present", pred_args.present, "Prefix length, s after start")
      ->required();
  pred_cmd->add_option("--horizon", pred_args.horizon, "Prediction horizon, s after start");
  pred_cmd->add_option("--online-config", pred_args.online_config, "Online predictor config");
  pred_cmd->add_option("--out", pred_args.out, "Output predicted trajectory CSV")->required();
  pred_cmd->add_option("--report", pred_args.report, "Optional JSON report path");

  EvaluateArgs eval_off_args;
  auto* eval_off_cmd =
      app.add_subcommand("evaluate-offline", "Whole-trajectory accuracy experiment");
  eval_off_cmd->add_option("--dataset", eval_off_args.dataset, "Trajectory directory")
      ->required();
  eval_off_cmd->add_option("--offsets", eval_off_args.offsets, "Metering offsets, min");
  eval_off_cmd->add_option("--budget", eval_off_args.budget, "Evaluations per fit");
  eval_off_cmd->add_option("--restarts", eval_off_args.restarts, "Optimizer restarts");
  eval_off_cmd->add_option("--jobs", eval_off_args.jobs, "Worker threads (0 = auto)");
  eval_off_cmd->add_option("--report", eval_off_args.report, "Report path (text; CSV beside)")
      ->required();

  EvaluateArgs eval_on_args;
  eval_on_args.offsets = "2,5,10";
  eval_on_args.budget = 1000;
  eval_on_args.restarts = 0;
  auto* eval_on_cmd = app.add_subcommand("evaluate-online", "Online prediction experiment");
  eval_on_cmd->add_option("--dataset", eval_on_args.dataset, "Trajectory directory")
      ->required();
  eval_on_cmd->add_option("--slices", eval_on_args.slices, "Present times, s");
  eval_on_cmd->add_option("--offsets", eval_on_args.offsets, "Metering offsets, min");
  eval_on_cmd->add_option("--online-config", eval_on_args.online_config,
                          "Online predictor config");
  eval_on_cmd->add_option("--budget", eval_on_args.budget, "Evaluations per lambda fit");
  eval_on_cmd->add_option("--jobs", eval_on_args.jobs, "Worker threads (0 = auto)");
  eval_on_cmd->add_option("--report", eval_on_args.report, "Report path (text; CSV beside)")
      ->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--n", synth_args.n, "Number of trajectories");
  synth_cmd->add_option("--spec", synth_args.spec, "Synthetic dataset spec file");
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("mass-sweep", "Altitude-vs-time curves per mass");
  sweep_cmd->add_option("--masses", sweep_args.masses, "Comma-separated masses, kg")
      ->required();
  sweep_cmd->add_option("--cruise-fl", sweep_args.cruise_fl, "Level-off flight level");
  sweep_cmd->add_option("--horizon", sweep_args.horizon, "Time horizon, s");
  sweep_cmd->add_option("--out", sweep_args.out, "Output CSV (mass_kg,t_s,alt_fl)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  synth_args.seed_given = seed_opt->count() > 0;

  try {
    if (sim_cmd->parsed()) return run_simulate(common, sim_args);
    if (fit_cmd->parsed()) return run_fit(common, fit_args);
    if (pred_cmd->parsed()) return run_predict(common, pred_args);
    if (eval_off_cmd->parsed()) return run_evaluate(common, eval_off_args, false);
    if (eval_on_cmd->parsed()) return run_evaluate(common, eval_on_args, true);
    if (synth_cmd->parsed()) return run_synth(common, synth_args);
    if (sweep_cmd->parsed()) return run_mass_sweep(common, sweep_args);
  } catch (const PrefixTooShortError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrefixTooShort;
  } catch (const OptimizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOptimizerError;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimulationError;
  } catch (const EnvelopeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimulationError;
  } catch (const CsvParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
