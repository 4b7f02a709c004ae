#pragma once

#include <utility>
#include <vector>

#include "climbtp/mode.hpp"
#include "climbtp/performance.hpp"

namespace climbtp {

/// The five tuned quantities of the climb model. Masses in kg, temperature
/// offset in K, schedule speeds in kt CAS plus a dimensionless Mach.
struct TuningParams {
  double mass_kg = 0;
  double temp_offset_K = 0;
  double v1_kt = 0;   // CAS target, FL60 to FL100
  double v2_kt = 0;   // CAS target, FL100 to the crossover altitude
  double mach = 0;    // Mach target above the crossover altitude

  bool operator==(const TuningParams&) const = default;
};

/// Nominal parameter vector for an aircraft model: reference mass, standard
/// day, and the model's default speed schedule.
TuningParams default_params(const AircraftPerfModel& model);

/// Continuous state of the hybrid system.
struct State {
  double t = 0;   // s
  Mode mode{};
  double h = 0;   // m
  double v = 0;   // m/s TAS
};

/// Guidance configuration: the speed-trend deadband and the fixed low-level
/// departure schedule that applies before the tuned speeds take over.
struct DynamicsConfig {
  double trend_epsilon_mps = 2.0 * 0.514444;  // deadband half-width, TAS
  // (FL ceiling, kt CAS) bands, ceilings strictly increasing, last entry 60.
  std::vector<std::pair<double, double>> below_fl60_schedule = {
      {15, 170}, {30, 185}, {40, 200}, {50, 220}, {60, 240}};
  bool cap_250_below_fl100 = false;

  void validate() const;  // throws ConfigError
};

/// Per-simulation cache: the CAS/Mach crossover of a parameter set is fixed,
/// so it is resolved once here instead of per evaluation. When the curves
/// never cross in the search window the schedule degenerates by sign: an
/// always-slower Mach target applies from the ground, an always-faster one
/// never applies.
class ClimbSchedule {
 public:
  ClimbSchedule(const TuningParams& params, const DynamicsConfig& cfg);

  double crossover_m() const { return crossover_m_; }
  const TuningParams& params() const { return params_; }
  const DynamicsConfig& config() const { return cfg_; }

  /// Target TAS at altitude.
  double target_tas(double altitude_m) const;

  /// Discrete mode at (v, h).
  Mode mode_at(double v_tas_mps, double altitude_m) const;

 private:
  TuningParams params_;
  DynamicsConfig cfg_;
  double crossover_m_;
};

/// One-shot conveniences over a freshly built ClimbSchedule.
Mode mode_of(double v_tas_mps, double altitude_m, const TuningParams& params,
             const DynamicsConfig& cfg);
double target_speed(double altitude_m, const TuningParams& params, const DynamicsConfig& cfg);

/// Rate of climb of the total-energy balance: temperature-deviation factor
/// times specific excess power times the energy share of the current mode,
/// reduced by the climb-power multiplier. May be negative.
double rate_of_climb(double v_tas_mps, double altitude_m, const Mode& mode,
                     const TuningParams& params, const AircraftPerfModel& model);

/// Longitudinal acceleration from the force balance along the flight path.
/// sin(gamma) = hdot/v is clamped to [-1, 1]; a clamp is flagged through
/// `clamped` when provided so the integrator can count incidents.
double acceleration(double altitude_m, double v_tas_mps, double hdot_mps,
                    const TuningParams& params, const AircraftPerfModel& model,
                    bool* clamped = nullptr);

}  // namespace climbtp
