#pragma once

#include <cstdint>
#include <string>

namespace climbtp {

/// Speed-law component: which target the schedule hands out.
enum class SpeedLaw : std::uint8_t { Cas, Mach };

/// Atmosphere-layer component: below or above the tropopause.
enum class Layer : std::uint8_t { Low, High };

/// Speed-trend component relative to the target speed band.
enum class SpeedTrend : std::uint8_t { Decelerate, Constant, Accelerate };

/// Discrete mode of the hybrid system; 2 x 2 x 3 = 12 elements.
struct Mode {
  SpeedLaw law = SpeedLaw::Cas;
  Layer layer = Layer::Low;
  SpeedTrend trend = SpeedTrend::Constant;

  bool operator==(const Mode&) const = default;
};

inline std::string to_string(const Mode& m) {
  std::string s;
  s += (m.law == SpeedLaw::Cas) ? "CAS" : "MACH";
  s += (m.layer == Layer::Low) ? "/LOW" : "/HIGH";
  switch (m.trend) {
    case SpeedTrend::Decelerate: s += "/DEC"; break;
    case SpeedTrend::Constant: s += "/CST"; break;
    case SpeedTrend::Accelerate: s += "/ACC"; break;
  }
  return s;
}

}  // namespace climbtp
