#include "climbtp/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "climbtp/atmosphere.hpp"
#include "climbtp/errors.hpp"
#include "climbtp/rng.hpp"
#include "climbtp/units.hpp"

namespace climbtp {

namespace {

constexpr const char* kTrajectoryHeader = "t_s,alt_ft,tas_kt,roc_fpm";

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& token, long line) {
  const std::string t = trim(token);
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(value)) {
    throw CsvParseError("cannot parse number '" + t + "'", line);
  }
  return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Ordered key/value pairs of a flat config file.
std::map<std::string, std::string> parse_kv_file(const std::filesystem::path& path,
                                                 const std::set<std::string>& known_keys) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys.contains(key)) {
      std::cerr << "warning: " << path.string() << ": unknown key '" << key << "' ignored\n";
      continue;
    }
    kv[key] = value;
  }
  return kv;
}

double require_double(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::filesystem::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(path.string() + ": missing key '" + key + "'");
  return parse_number(it->second, 0);
}

double optional_double(const std::map<std::string, std::string>& kv, const std::string& key,
                       double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_number(it->second, 0);
}

const std::set<std::string> kAircraftKeys = {
    "label",          "mass_ref_kg",   "mass_min_kg",       "mass_max_kg",
    "wing_area_m2",   "cd0",           "cd2",               "ctc1_N",
    "ctc2_ft",        "ctc3_per_ft2",  "c_red",             "v_stall_kt",
    "v_mo_kt",        "m_mo",          "h_max_ft",          "esf_acc",
    "esf_dec",        "default_v1_kt", "default_v2_kt",     "default_mach",
    "q3_epsilon_kt",  "cap_250_below_fl100",                "below_fl60_schedule"};

const std::set<std::string> kBoundsKeys = {
    "m_low_kg",  "m_high_kg",  "dT_low_K",  "dT_high_K", "v1_low_kt",
    "v1_high_kt", "v2_low_kt", "v2_high_kt", "mach_low",  "mach_high"};

const std::set<std::string> kOnlineKeys = {
    "validation_points", "lambda0",      "lambda_growth",
    "fallback_threshold_fl", "evals_budget", "max_lambda_doublings"};

const std::set<std::string> kSynthKeys = {
    "n_trajectories", "seed",        "mass_low_kg",   "mass_high_kg",
    "dT_low_K",       "dT_high_K",   "v1_low_kt",     "v1_high_kt",
    "v2_low_kt",      "v2_high_kt",  "mach_low",      "mach_high",
    "cruise_fl_low",  "cruise_fl_high", "altitude_noise_sigma_fl",
    "initial_altitude_ft", "initial_cas_kt", "min_duration_s"};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Trajectory parse_trajectory_csv(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw CsvParseError("empty file", 1);
  ++line_no;
  if (trim(line) != kTrajectoryHeader) {
    throw CsvParseError(std::string("expected header '") + kTrajectoryHeader + "'", line_no);
  }

  Trajectory traj;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw CsvParseError("expected 4 columns", line_no);
    Sample s;
    s.t = parse_number(fields[0], line_no);
    s.h = units::ft_to_m(parse_number(fields[1], line_no));
    s.v = units::kt_to_mps(parse_number(fields[2], line_no));
    s.roc = units::fpm_to_mps(parse_number(fields[3], line_no));

    if (!traj.samples.empty()) {
      const double spacing = s.t - traj.samples.back().t;
      if (spacing <= 0) throw CsvParseError("timestamps must strictly increase", line_no);
      if (traj.samples.size() == 1) {
        traj.dt = spacing;
      } else if (std::abs(spacing - traj.dt) > 1e-6) {
        throw CsvParseError("irregular sample spacing", line_no);
      }
    }
    traj.samples.push_back(s);
  }
  if (traj.samples.empty()) throw CsvParseError("no samples", line_no);
  traj.t0 = traj.samples.front().t;
  if (traj.samples.size() == 1) traj.dt = 5.0;
  return traj;
}

Trajectory parse_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file: " + path.string());
  try {
    return parse_trajectory_csv(in);
  } catch (const CsvParseError& e) {
    throw CsvParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << kTrajectoryHeader << "\n";
  for (const Sample& s : traj.samples) {
    out << format_number(s.t) << ',' << format_number(units::m_to_ft(s.h)) << ','
        << format_number(units::mps_to_kt(s.v)) << ','
        << format_number(units::mps_to_fpm(s.roc)) << "\n";
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  write_trajectory_csv(traj, out);
  if (!out) throw ConfigError("write failed: " + path.string());
}

AircraftPerfModel load_perf(const std::filesystem::path& path) {
  const auto kv = parse_kv_file(path, kAircraftKeys);
  AircraftPerfModel m;
  if (const auto it = kv.find("label"); it != kv.end()) m.label = it->second;
  m.mass_ref_kg = require_double(kv, "mass_ref_kg", path);
  m.mass_min_kg = require_double(kv, "mass_min_kg", path);
  m.mass_max_kg = require_double(kv, "mass_max_kg", path);
  m.wing_area_m2 = require_double(kv, "wing_area_m2", path);
  m.cd0 = require_double(kv, "cd0", path);
  m.cd2 = require_double(kv, "cd2", path);
  m.ctc1_N = require_double(kv, "ctc1_N", path);
  m.ctc2_ft = require_double(kv, "ctc2_ft", path);
  m.ctc3_per_ft2 = require_double(kv, "ctc3_per_ft2", path);
  m.c_red = require_double(kv, "c_red", path);
  m.v_stall_kt = require_double(kv, "v_stall_kt", path);
  m.v_mo_kt = require_double(kv, "v_mo_kt", path);
  m.m_mo = require_double(kv, "m_mo", path);
  m.h_max_ft = require_double(kv, "h_max_ft", path);
  m.esf_acc = optional_double(kv, "esf_acc", m.esf_acc);
  m.esf_dec = optional_double(kv, "esf_dec", m.esf_dec);
  m.default_v1_kt = optional_double(kv, "default_v1_kt", m.default_v1_kt);
  m.default_v2_kt = optional_double(kv, "default_v2_kt", m.default_v2_kt);
  m.default_mach = optional_double(kv, "default_mach", m.default_mach);
  m.validate();
  return m;
}

DynamicsConfig load_dynamics(const std::filesystem::path& path) {
  const auto kv = parse_kv_file(path, kAircraftKeys);
  DynamicsConfig cfg;
  cfg.trend_epsilon_mps =
      units::kt_to_mps(optional_double(kv, "q3_epsilon_kt", 2.0));
  if (const auto it = kv.find("cap_250_below_fl100"); it != kv.end()) {
    cfg.cap_250_below_fl100 = (it->second == "true" || it->second == "1");
  }
  if (const auto it = kv.find("below_fl60_schedule"); it != kv.end()) {
    cfg.below_fl60_schedule.clear();
    for (const std::string& entry : split(it->second, ',')) {
      const auto parts = split(entry, ':');
      if (parts.size() != 2) {
        throw ConfigError(path.string() + ": below_fl60_schedule entries must be FL:kt");
      }
      cfg.below_fl60_schedule.emplace_back(parse_number(parts[0], 0),
                                           parse_number(parts[1], 0));
    }
  }
  cfg.validate();
  return cfg;
}

ParamBounds load_bounds(const std::filesystem::path& path) {
  const auto kv = parse_kv_file(path, kBoundsKeys);
  ParamBounds b;
  b.mass_kg = {require_double(kv, "m_low_kg", path), require_double(kv, "m_high_kg", path)};
  b.temp_offset_K = {require_double(kv, "dT_low_K", path),
                     require_double(kv, "dT_high_K", path)};
  b.v1_kt = {require_double(kv, "v1_low_kt", path), require_double(kv, "v1_high_kt", path)};
  b.v2_kt = {require_double(kv, "v2_low_kt", path), require_double(kv, "v2_high_kt", path)};
  b.mach = {require_double(kv, "mach_low", path), require_double(kv, "mach_high", path)};
  b.validate();
  return b;
}

OnlineConfig load_online_config(const std::filesystem::path& path) {
  const auto kv = parse_kv_file(path, kOnlineKeys);
  OnlineConfig cfg;
  cfg.validation_points = static_cast<int>(optional_double(kv, "validation_points", 36));
  cfg.lambda0 = optional_double(kv, "lambda0", 100.0);
  cfg.lambda_growth = optional_double(kv, "lambda_growth", 2.0);
  cfg.fallback_threshold_fl = optional_double(kv, "fallback_threshold_fl", 5.0);
  cfg.evals_budget = static_cast<long>(optional_double(kv, "evals_budget", 1000));
  cfg.max_lambda_doublings =
      static_cast<int>(optional_double(kv, "max_lambda_doublings", 12));
  if (cfg.validation_points < 1 || !(cfg.lambda0 > 0) || !(cfg.lambda_growth > 1) ||
      !(cfg.fallback_threshold_fl > 0) || cfg.evals_budget < 1) {
    throw ConfigError(path.string() + ": invalid online predictor configuration");
  }
  return cfg;
}

void SynthSpec::validate() const {
  if (n_trajectories < 1) throw ConfigError("synth spec: n_trajectories must be >= 1");
  if (altitude_noise_sigma_fl < 0) throw ConfigError("synth spec: noise sigma must be >= 0");
  auto check = [](const Interval& iv, const char* key) {
    if (!(iv.lo <= iv.hi)) throw ConfigError(std::string("synth spec: ") + key + " inverted");
  };
  check(mass_kg, "mass");
  check(temp_offset_K, "dT");
  check(v1_kt, "v1");
  check(v2_kt, "v2");
  check(mach, "mach");
  check(cruise_fl, "cruise_fl");
  if (!(initial_altitude_ft >= 0) || !(initial_cas_kt > 0) || !(min_duration_s > 0)) {
    throw ConfigError("synth spec: initial state and duration must be positive");
  }
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  const auto kv = parse_kv_file(path, kSynthKeys);
  SynthSpec s;
  s.n_trajectories = static_cast<int>(optional_double(kv, "n_trajectories", s.n_trajectories));
  s.seed = static_cast<std::uint64_t>(optional_double(kv, "seed", static_cast<double>(s.seed)));
  s.mass_kg = {optional_double(kv, "mass_low_kg", s.mass_kg.lo),
               optional_double(kv, "mass_high_kg", s.mass_kg.hi)};
  s.temp_offset_K = {optional_double(kv, "dT_low_K", s.temp_offset_K.lo),
                     optional_double(kv, "dT_high_K", s.temp_offset_K.hi)};
  s.v1_kt = {optional_double(kv, "v1_low_kt", s.v1_kt.lo),
             optional_double(kv, "v1_high_kt", s.v1_kt.hi)};
  s.v2_kt = {optional_double(kv, "v2_low_kt", s.v2_kt.lo),
             optional_double(kv, "v2_high_kt", s.v2_kt.hi)};
  s.mach = {optional_double(kv, "mach_low", s.mach.lo),
            optional_double(kv, "mach_high", s.mach.hi)};
  s.cruise_fl = {optional_double(kv, "cruise_fl_low", s.cruise_fl.lo),
                 optional_double(kv, "cruise_fl_high", s.cruise_fl.hi)};
  s.altitude_noise_sigma_fl =
      optional_double(kv, "altitude_noise_sigma_fl", s.altitude_noise_sigma_fl);
  s.initial_altitude_ft = optional_double(kv, "initial_altitude_ft", s.initial_altitude_ft);
  s.initial_cas_kt = optional_double(kv, "initial_cas_kt", s.initial_cas_kt);
  s.min_duration_s = optional_double(kv, "min_duration_s", s.min_duration_s);
  s.validate();
  return s;
}

SyntheticDataset generate_synthetic(const SynthSpec& spec, const AircraftPerfModel& model,
                                    const DynamicsConfig& cfg) {
  spec.validate();
  SyntheticDataset data;
  Rng rng(spec.seed);
  auto draw = [&](const Interval& iv) { return rng.uniform(iv.lo, iv.hi); };

  for (int i = 0; i < spec.n_trajectories; ++i) {
    TuningParams theta;
    theta.mass_kg = draw(spec.mass_kg);
    theta.temp_offset_K = draw(spec.temp_offset_K);
    theta.v1_kt = draw(spec.v1_kt);
    theta.v2_kt = draw(spec.v2_kt);
    while (theta.v2_kt < theta.v1_kt) {
      theta.v1_kt = draw(spec.v1_kt);
      theta.v2_kt = draw(spec.v2_kt);
    }
    theta.mach = draw(spec.mach);
    double cruise_fl = 10.0 * std::round(draw(spec.cruise_fl) / 10.0);
    cruise_fl = std::clamp(cruise_fl, spec.cruise_fl.lo, spec.cruise_fl.hi);

    State s0;
    s0.t = 0.0;
    s0.h = units::ft_to_m(spec.initial_altitude_ft);
    s0.v = cas_to_tas(units::kt_to_mps(spec.initial_cas_kt), s0.h, theta.temp_offset_K);

    SimulationOutcome sim = simulate(theta, s0, cruise_fl, 7200.0, 1.0, cfg, model);
    Trajectory traj = resample(sim.trajectory, 5.0);
    const double end = std::max(spec.min_duration_s, traj.duration() + 240.0);
    traj = extend_trajectory(traj, end);

    if (spec.altitude_noise_sigma_fl > 0) {
      const double sigma_m = spec.altitude_noise_sigma_fl * units::kFlightLevelMeters;
      for (Sample& s : traj.samples) s.h += sigma_m * rng.normal();
      const std::size_t n = traj.samples.size();
      for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
          traj.samples[k].roc = (traj.samples[1].h - traj.samples[0].h) / traj.dt;
        } else if (k == n - 1) {
          traj.samples[k].roc = (traj.samples[k].h - traj.samples[k - 1].h) / traj.dt;
        } else {
          traj.samples[k].roc =
              (traj.samples[k + 1].h - traj.samples[k - 1].h) / (2.0 * traj.dt);
        }
      }
    }

    char name[32];
    std::snprintf(name, sizeof name, "flight_%03d.csv", i);
    data.trajectories.push_back({name, std::move(traj)});
    data.truth.push_back(theta);
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("dataset directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv" && entry.path().filename() != "truth.csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Dataset dataset;
  for (const auto& f : files) {
    dataset.push_back({f.filename().string(), parse_trajectory_csv(f)});
  }
  return dataset;
}

void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream truth(dir / "truth.csv");
  if (!truth) throw ConfigError("cannot write truth.csv in " + dir.string());
  truth << "file,mass_kg,dT_K,v1_kt,v2_kt,mach\n";
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const auto& lt = data.trajectories[i];
    write_trajectory_csv(lt.trajectory, dir / lt.id);
    const TuningParams& th = data.truth[i];
    truth << lt.id << ',' << format_number(th.mass_kg) << ','
          << format_number(th.temp_offset_K) << ',' << format_number(th.v1_kt) << ','
          << format_number(th.v2_kt) << ',' << format_number(th.mach) << "\n";
  }
}

}  // namespace climbtp
