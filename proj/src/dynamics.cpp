#include "climbtp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "climbtp/atmosphere.hpp"
#include "climbtp/errors.hpp"
#include "climbtp/units.hpp"

namespace climbtp {

namespace {
constexpr double kFl60 = 60 * units::kFlightLevelMeters;
constexpr double kFl100 = 100 * units::kFlightLevelMeters;
}  // namespace

TuningParams default_params(const AircraftPerfModel& model) {
  return TuningParams{model.mass_ref_kg, 0.0, model.default_v1_kt, model.default_v2_kt,
                      model.default_mach};
}

void DynamicsConfig::validate() const {
  if (!(trend_epsilon_mps > 0)) {
    throw ConfigError("dynamics config: trend_epsilon must be positive");
  }
  if (below_fl60_schedule.empty()) {
    throw ConfigError("dynamics config: below_fl60_schedule must not be empty");
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [ceiling_fl, cas_kt] : below_fl60_schedule) {
    if (!(ceiling_fl > prev)) {
      throw ConfigError("dynamics config: below_fl60_schedule ceilings must increase");
    }
    if (!(cas_kt > 0)) {
      throw ConfigError("dynamics config: below_fl60_schedule speeds must be positive");
    }
    prev = ceiling_fl;
  }
  if (below_fl60_schedule.back().first != 60) {
    throw ConfigError("dynamics config: below_fl60_schedule must end at FL60");
  }
}

ClimbSchedule::ClimbSchedule(const TuningParams& params, const DynamicsConfig& cfg)
    : params_(params), cfg_(cfg) {
  const double v2_mps = units::kt_to_mps(params.v2_kt);
  try {
    crossover_m_ = crossover_altitude(v2_mps, params.mach);
  } catch (const NoCrossoverError&) {
    const double cas_tas0 = cas_to_tas(v2_mps, 0.0, 0.0);
    const double mach_tas0 = mach_to_tas(params.mach, 0.0, 0.0);
    crossover_m_ = (cas_tas0 >= mach_tas0) ? 0.0 : std::numeric_limits<double>::infinity();
  }
}

double ClimbSchedule::target_tas(double altitude_m) const {
  const double dT = params_.temp_offset_K;
  if (altitude_m > crossover_m_) {
    return mach_to_tas(params_.mach, altitude_m, dT);
  }
  const double fl = units::m_to_fl(altitude_m);
  double cas_kt;
  if (fl <= 60.0) {
    cas_kt = cfg_.below_fl60_schedule.back().second;
    for (const auto& [ceiling_fl, band_kt] : cfg_.below_fl60_schedule) {
      if (fl <= ceiling_fl) {
        cas_kt = band_kt;
        break;
      }
    }
  } else if (fl <= 100.0) {
    cas_kt = params_.v1_kt;
    if (cfg_.cap_250_below_fl100) cas_kt = std::min(cas_kt, 250.0);
  } else {
    cas_kt = params_.v2_kt;
  }
  return cas_to_tas(units::kt_to_mps(cas_kt), altitude_m, dT);
}

Mode ClimbSchedule::mode_at(double v_tas_mps, double altitude_m) const {
  Mode mode;
  mode.law = (altitude_m <= crossover_m_) ? SpeedLaw::Cas : SpeedLaw::Mach;
  mode.layer = (altitude_m <= kIsa.tropopause_alt) ? Layer::Low : Layer::High;
  const double target = target_tas(altitude_m);
  if (v_tas_mps <= target - cfg_.trend_epsilon_mps) {
    mode.trend = SpeedTrend::Accelerate;
  } else if (v_tas_mps >= target + cfg_.trend_epsilon_mps) {
    mode.trend = SpeedTrend::Decelerate;
  } else {
    mode.trend = SpeedTrend::Constant;
  }
  return mode;
}

Mode mode_of(double v_tas_mps, double altitude_m, const TuningParams& params,
             const DynamicsConfig& cfg) {
  return ClimbSchedule(params, cfg).mode_at(v_tas_mps, altitude_m);
}

double target_speed(double altitude_m, const TuningParams& params, const DynamicsConfig& cfg) {
  return ClimbSchedule(params, cfg).target_tas(altitude_m);
}

double rate_of_climb(double v_tas_mps, double altitude_m, const Mode& mode,
                     const TuningParams& params, const AircraftPerfModel& model) {
  const double dT = params.temp_offset_K;
  const AtmosphereState atm = atmosphere_at(altitude_m, dT);
  const double temp_factor = (atm.temperature - dT) / atm.temperature;
  const double thrust = climb_thrust_raw(altitude_m, model);
  const double d = drag(v_tas_mps, altitude_m, dT, params.mass_kg, model);
  const double specific_power =
      (thrust - d) * v_tas_mps / (params.mass_kg * kIsa.g);
  const double esf = energy_share_factor(v_tas_mps, altitude_m, dT, mode, model);
  return model.c_red * temp_factor * specific_power * esf;
}

double acceleration(double altitude_m, double v_tas_mps, double hdot_mps,
                    const TuningParams& params, const AircraftPerfModel& model,
                    bool* clamped) {
  const double thrust = climb_thrust_raw(altitude_m, model);
  const double d = drag(v_tas_mps, altitude_m, params.temp_offset_K, params.mass_kg, model);
  double sin_gamma = hdot_mps / v_tas_mps;
  if (sin_gamma < -1.0 || sin_gamma > 1.0) {
    sin_gamma = std::clamp(sin_gamma, -1.0, 1.0);
    if (clamped != nullptr) *clamped = true;
  }
  return (thrust - d - params.mass_kg * kIsa.g * sin_gamma) / params.mass_kg;
}

}  // namespace climbtp
