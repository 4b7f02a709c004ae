#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "climbtp/estimation.hpp"
#include "climbtp/evaluation.hpp"
#include "climbtp/integrator.hpp"

namespace climbtp {

/// Trajectory CSV: header `t_s,alt_ft,tas_kt,roc_fpm`, aviation units at the
/// file boundary, SI inside. Requires strictly increasing timestamps with
/// constant spacing; throws CsvParseError with the offending line otherwise.
Trajectory parse_trajectory_csv(std::istream& in);
Trajectory parse_trajectory_csv(const std::filesystem::path& path);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Flat `key = value` config files with `#` comments. Unknown keys warn on
/// stderr but do not fail; missing required keys or invariant violations
/// throw ConfigError naming the key.
AircraftPerfModel load_perf(const std::filesystem::path& path);
DynamicsConfig load_dynamics(const std::filesystem::path& path);
ParamBounds load_bounds(const std::filesystem::path& path);
OnlineConfig load_online_config(const std::filesystem::path& path);

/// Synthetic dataset recipe standing in for recorded radar tracks.
struct SynthSpec {
  int n_trajectories = 262;
  std::uint64_t seed = 1;
  Interval mass_kg{52000, 74000};
  Interval temp_offset_K{-10, 10};
  Interval v1_kt{230, 270};
  Interval v2_kt{270, 320};
  Interval mach{0.74, 0.80};
  Interval cruise_fl{320, 370};
  double altitude_noise_sigma_fl = 0.5;
  double initial_altitude_ft = 1500;
  double initial_cas_kt = 160;
  double min_duration_s = 1200;

  void validate() const;  // throws ConfigError
};

SynthSpec load_synth_spec(const std::filesystem::path& path);

struct SyntheticDataset {
  Dataset trajectories;
  std::vector<TuningParams> truth;  // generating parameters, same order
};

/// Deterministic per seed: each flight draws its parameters (v2 >= v1 by
/// rejection) and cruise level, is simulated from the standard initial
/// state, resampled to the 5 s grid, held at the cruise level until the
/// minimum duration, and optionally jittered with Gaussian altitude noise
/// (climb rate then recomputed by finite differences).
SyntheticDataset generate_synthetic(const SynthSpec& spec, const AircraftPerfModel& model,
                                    const DynamicsConfig& cfg);

/// Directory of `*.csv` trajectories (sorted by filename) plus an optional
/// `truth.csv` manifest with columns file,mass_kg,dT_K,v1_kt,v2_kt,mach.
Dataset load_dataset(const std::filesystem::path& dir);
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace climbtp
