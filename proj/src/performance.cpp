#include "climbtp/performance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "climbtp/atmosphere.hpp"
#include "climbtp/errors.hpp"
#include "climbtp/units.hpp"

namespace climbtp {

double AircraftPerfModel::ceiling_m() const { return units::ft_to_m(h_max_ft); }

void AircraftPerfModel::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("aircraft config: " + key + " " + why);
  };
  if (!(mass_min_kg > 0)) fail("mass_min_kg", "must be positive");
  if (!(mass_min_kg < mass_ref_kg && mass_ref_kg < mass_max_kg)) {
    fail("mass", "requires mass_min < mass_ref < mass_max");
  }
  if (!(wing_area_m2 > 0)) fail("wing_area_m2", "must be positive");
  if (!(cd0 > 0)) fail("cd0", "must be positive");
  if (!(cd2 > 0)) fail("cd2", "must be positive");
  if (!(ctc1_N > 0)) fail("ctc1_N", "must be positive");
  if (!(ctc2_ft > 0)) fail("ctc2_ft", "must be positive");
  if (!(c_red > 0 && c_red <= 1.0)) fail("c_red", "must be in (0, 1]");
  if (!(esf_acc > 0 && esf_acc < 1.0)) fail("esf_acc", "must be in (0, 1)");
  if (!(esf_dec > 1.0)) fail("esf_dec", "must be greater than 1");
  if (!(v_stall_kt > 0)) fail("v_stall_kt", "must be positive");
  if (!(v_stall_kt < v_mo_kt)) fail("v_mo_kt", "must exceed v_stall_kt");
  if (!(m_mo > 0)) fail("m_mo", "must be positive");
  if (!(h_max_ft > 0)) fail("h_max_ft", "must be positive");
  if (!(default_v1_kt > 0 && default_v2_kt >= default_v1_kt)) {
    fail("default_v2_kt", "requires 0 < default_v1_kt <= default_v2_kt");
  }
  if (!(default_mach > 0 && default_mach <= m_mo)) {
    fail("default_mach", "must be in (0, m_mo]");
  }
}

double climb_thrust_raw(double altitude_m, const AircraftPerfModel& model) {
  const double h_ft = units::m_to_ft(altitude_m);
  const double thrust =
      model.ctc1_N * (1.0 - h_ft / model.ctc2_ft + model.ctc3_per_ft2 * h_ft * h_ft);
  return std::max(thrust, 0.0);
}

double max_climb_thrust(double altitude_m, double /*temp_offset_K*/,
                        const AircraftPerfModel& model) {
  if (!(altitude_m >= 0.0) || altitude_m > model.ceiling_m()) {
    throw EnvelopeError("altitude " + std::to_string(altitude_m) +
                        " m outside [0, ceiling] for thrust evaluation");
  }
  return climb_thrust_raw(altitude_m, model);
}

double drag(double v_tas_mps, double altitude_m, double temp_offset_K, double mass_kg,
            const AircraftPerfModel& model) {
  const AtmosphereState atm = atmosphere_at(altitude_m, temp_offset_K);
  const double q_inf = 0.5 * atm.density * v_tas_mps * v_tas_mps;
  const double cl = mass_kg * kIsa.g / (q_inf * model.wing_area_m2);
  const double cd = model.cd0 + model.cd2 * cl * cl;
  return cd * q_inf * model.wing_area_m2;
}

double energy_share_factor(double v_tas_mps, double altitude_m, double temp_offset_K,
                           const Mode& mode, const AircraftPerfModel& model) {
  if (mode.trend == SpeedTrend::Accelerate) return model.esf_acc;
  if (mode.trend == SpeedTrend::Decelerate) return model.esf_dec;

  const PhysicalConstants& c = kIsa;
  const AtmosphereState atm = atmosphere_at(altitude_m, temp_offset_K);
  const double mach = v_tas_mps / atm.speed_of_sound;
  const double m2 = mach * mach;

  // Lapse term: kinetic-energy change of a constant-Mach/CAS climb through
  // the tropospheric temperature gradient.
  const double lapse_term = c.kappa * c.gas_constant * c.lapse_rate / (2.0 * c.g) * m2 *
                            (atm.temperature - temp_offset_K) / atm.temperature;
  // Compressibility term of the constant-CAS condition.
  const double base = 1.0 + 0.5 * (c.kappa - 1.0) * m2;
  const double compress_term = std::pow(base, -1.0 / (c.kappa - 1.0)) *
                               (std::pow(base, c.kappa / (c.kappa - 1.0)) - 1.0);

  double f;
  if (mode.law == SpeedLaw::Mach) {
    f = (mode.layer == Layer::High) ? 1.0 : 1.0 / (1.0 + lapse_term);
  } else {
    f = (mode.layer == Layer::High) ? 1.0 / (1.0 + compress_term)
                                    : 1.0 / (1.0 + lapse_term + compress_term);
  }
  return std::clamp(f, model.esf_acc, model.esf_dec);
}

EnvelopeReport envelope_check(double v_tas_mps, double altitude_m, double temp_offset_K,
                              const AircraftPerfModel& model) {
  EnvelopeReport report;
  const double cas_kt = units::mps_to_kt(tas_to_cas(v_tas_mps, altitude_m, temp_offset_K));
  const double mach = tas_to_mach(v_tas_mps, altitude_m, temp_offset_K);
  if (cas_kt < model.v_stall_kt) report.violations.push_back(EnvelopeViolation::Stall);
  if (cas_kt > model.v_mo_kt) report.violations.push_back(EnvelopeViolation::Overspeed);
  if (mach > model.m_mo) report.violations.push_back(EnvelopeViolation::MachLimit);
  if (altitude_m > model.ceiling_m()) report.violations.push_back(EnvelopeViolation::Ceiling);
  return report;
}

}  // namespace climbtp
