#include "climbtp/atmosphere.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "climbtp/errors.hpp"

namespace climbtp {

namespace {

constexpr double kMinAltitude = -500.0;
constexpr double kMaxAltitude = 50000.0;

void check_altitude(double h) {
  if (!(h >= kMinAltitude && h <= kMaxAltitude)) {
    throw std::domain_error("altitude out of range: " + std::to_string(h) + " m");
  }
}

void check_positive_speed(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::domain_error(std::string(name) + " must be positive");
  }
}

/// Standard-day pressure (no temperature offset in the exponent base).
double isa_pressure(double h) {
  const PhysicalConstants& c = kIsa;
  const double exponent = -c.g / (c.lapse_rate * c.gas_constant);
  const double t_trop = c.sea_level_temp + c.lapse_rate * c.tropopause_alt;
  if (h <= c.tropopause_alt) {
    const double t_isa = c.sea_level_temp + c.lapse_rate * h;
    return c.sea_level_pressure * std::pow(t_isa / c.sea_level_temp, exponent);
  }
  const double p_trop =
      c.sea_level_pressure * std::pow(t_trop / c.sea_level_temp, exponent);
  return p_trop * std::exp(-c.g * (h - c.tropopause_alt) / (c.gas_constant * t_trop));
}

}  // namespace

AtmosphereState atmosphere_at(double altitude_m, double temp_offset_K) {
  check_altitude(altitude_m);
  const PhysicalConstants& c = kIsa;
  double temperature;
  if (altitude_m <= c.tropopause_alt) {
    temperature = c.sea_level_temp + temp_offset_K + c.lapse_rate * altitude_m;
  } else {
    temperature = c.sea_level_temp + temp_offset_K + c.lapse_rate * c.tropopause_alt;
  }
  const double pressure = isa_pressure(altitude_m);
  const double density = pressure / (c.gas_constant * temperature);
  const double speed_of_sound = std::sqrt(c.kappa * c.gas_constant * temperature);
  return AtmosphereState{temperature, pressure, density, speed_of_sound};
}

double cas_to_tas(double v_cas_mps, double altitude_m, double temp_offset_K) {
  check_positive_speed(v_cas_mps, "CAS");
  const PhysicalConstants& c = kIsa;
  const AtmosphereState atm = atmosphere_at(altitude_m, temp_offset_K);
  const double mu = (c.kappa - 1.0) / c.kappa;
  const double p0 = c.sea_level_pressure;
  const double rho0 = p0 / (c.gas_constant * c.sea_level_temp);
  const double inner =
      std::pow(1.0 + 0.5 * mu * rho0 / p0 * v_cas_mps * v_cas_mps, 1.0 / mu) - 1.0;
  const double outer = std::pow(1.0 + p0 / atm.pressure * inner, mu) - 1.0;
  return std::sqrt(2.0 / mu * atm.pressure / atm.density * outer);
}

double tas_to_cas(double v_tas_mps, double altitude_m, double temp_offset_K) {
  check_positive_speed(v_tas_mps, "TAS");
  const PhysicalConstants& c = kIsa;
  const AtmosphereState atm = atmosphere_at(altitude_m, temp_offset_K);
  const double mu = (c.kappa - 1.0) / c.kappa;
  const double p0 = c.sea_level_pressure;
  const double rho0 = p0 / (c.gas_constant * c.sea_level_temp);
  const double inner =
      std::pow(1.0 + 0.5 * mu * atm.density / atm.pressure * v_tas_mps * v_tas_mps,
               1.0 / mu) -
      1.0;
  const double outer = std::pow(1.0 + atm.pressure / p0 * inner, mu) - 1.0;
  return std::sqrt(2.0 / mu * p0 / rho0 * outer);
}

double mach_to_tas(double mach, double altitude_m, double temp_offset_K) {
  check_positive_speed(mach, "Mach");
  return mach * atmosphere_at(altitude_m, temp_offset_K).speed_of_sound;
}

double tas_to_mach(double v_tas_mps, double altitude_m, double temp_offset_K) {
  check_positive_speed(v_tas_mps, "TAS");
  return v_tas_mps / atmosphere_at(altitude_m, temp_offset_K).speed_of_sound;
}

double crossover_altitude(double v_cas_mps, double mach) {
  check_positive_speed(v_cas_mps, "CAS");
  check_positive_speed(mach, "Mach");
  const double hi_limit = kIsa.tropopause_alt + 10000.0;
  auto gap = [&](double h) { return cas_to_tas(v_cas_mps, h, 0.0) - mach_to_tas(mach, h, 0.0); };
  double lo = 0.0, hi = hi_limit;
  double g_lo = gap(lo), g_hi = gap(hi);
  if (!(g_lo < 0.0) || !(g_hi > 0.0)) {
    throw NoCrossoverError("CAS and Mach speed curves do not cross on [0, " +
                           std::to_string(hi_limit) + "] m");
  }
  while (hi - lo > 0.1) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace climbtp
