#pragma once

namespace climbtp {

/// ICAO standard atmosphere constants. Immutable; all SI.
struct PhysicalConstants {
  double g = 9.80665;               // m/s^2
  double gas_constant = 287.05287;  // J/(kg K), dry air
  double kappa = 1.4;               // adiabatic index
  double lapse_rate = -0.0065;      // K/m, troposphere
  double sea_level_temp = 288.15;   // K
  double sea_level_pressure = 101325.0;  // Pa
  double tropopause_alt = 11000.0;  // m, geopotential
};

inline constexpr PhysicalConstants kIsa{};

struct AtmosphereState {
  double temperature;     // K
  double pressure;        // Pa
  double density;         // kg/m^3
  double speed_of_sound;  // m/s
};

/// Atmosphere at geopotential altitude with an additive temperature offset.
/// The offset shifts temperature (and hence density and speed of sound) but
/// the pressure profile stays on the standard-day law, so the temperature
/// deviation shows up exactly once in the climb-rate equation.
/// Valid for h in [-500, 50000] m; throws std::domain_error outside.
AtmosphereState atmosphere_at(double altitude_m, double temp_offset_K);

/// Compressible-flow calibrated <-> true airspeed conversion at altitude.
double cas_to_tas(double v_cas_mps, double altitude_m, double temp_offset_K);
double tas_to_cas(double v_tas_mps, double altitude_m, double temp_offset_K);

double mach_to_tas(double mach, double altitude_m, double temp_offset_K);
double tas_to_mach(double v_tas_mps, double altitude_m, double temp_offset_K);

/// Altitude where a constant-CAS climb target meets a constant-Mach target
/// (standard day). Bisection to 0.1 m on [0, tropopause + 10000 m]; throws
/// NoCrossoverError when the two speed curves do not bracket a root there.
double crossover_altitude(double v_cas_mps, double mach);

}  // namespace climbtp
