#pragma once

#include <string>
#include <vector>

#include "climbtp/mode.hpp"

namespace climbtp {

/// Aircraft performance coefficients. The shipped default config is a
/// synthetic "A320-like" set with plausible magnitudes; it is not data from
/// any licensed performance database and must not be used operationally.
struct AircraftPerfModel {
  std::string label = "UNSET";
  double mass_ref_kg = 0;
  double mass_min_kg = 0;
  double mass_max_kg = 0;
  double wing_area_m2 = 0;
  double cd0 = 0;  // parasitic drag coefficient
  double cd2 = 0;  // induced drag factor
  double ctc1_N = 0;        // max-climb-thrust polynomial: ctc1*(1 - h/ctc2 + ctc3*h^2)
  double ctc2_ft = 0;
  double ctc3_per_ft2 = 0;
  double c_red = 1.0;       // reduced climb power multiplier, in (0, 1]
  double v_stall_kt = 0;    // CAS
  double v_mo_kt = 0;       // CAS, max operating
  double m_mo = 0;          // max operating Mach
  double h_max_ft = 0;      // ceiling
  double esf_acc = 0.3;     // energy share while accelerating
  double esf_dec = 1.7;     // energy share while decelerating
  // Nominal speed schedule used when no tuned parameters are available.
  double default_v1_kt = 250;
  double default_v2_kt = 300;
  double default_mach = 0.78;

  double ceiling_m() const;

  /// Throws ConfigError naming the offending key on invariant violation.
  void validate() const;
};

/// Max-climb-thrust polynomial, envelope-checked: throws EnvelopeError for
/// altitudes below 0 or above the ceiling. The temperature offset does not
/// enter the thrust law; its effect on climb rate is carried entirely by the
/// temperature-deviation factor and the air density.
double max_climb_thrust(double altitude_m, double temp_offset_K, const AircraftPerfModel& model);

/// Same polynomial without the envelope gate, clamped to be nonnegative.
/// The integrator uses this so that sub-step evaluations just past the
/// ceiling stay defined; envelope violations are reported by envelope_check.
double climb_thrust_raw(double altitude_m, const AircraftPerfModel& model);

/// Drag from the parabolic polar with lift balancing weight (small climb
/// angles, cos(gamma) ~ 1).
double drag(double v_tas_mps, double altitude_m, double temp_offset_K, double mass_kg,
            const AircraftPerfModel& model);

/// Fraction of excess power allocated to climb for the given mode:
/// fixed values while accelerating/decelerating, and the standard
/// total-energy expressions for the four constant-speed conditions
/// (CAS/Mach target, below/above the tropopause). Clamped to
/// [esf_acc, esf_dec].
double energy_share_factor(double v_tas_mps, double altitude_m, double temp_offset_K,
                           const Mode& mode, const AircraftPerfModel& model);

enum class EnvelopeViolation { Stall, Overspeed, MachLimit, Ceiling };

struct EnvelopeReport {
  std::vector<EnvelopeViolation> violations;
  bool ok() const { return violations.empty(); }
};

EnvelopeReport envelope_check(double v_tas_mps, double altitude_m, double temp_offset_K,
                              const AircraftPerfModel& model);

}  // namespace climbtp
