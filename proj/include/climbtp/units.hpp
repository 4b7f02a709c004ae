#pragma once

namespace climbtp::units {

inline constexpr double kFootMeters = 0.3048;
inline constexpr double kKnotMps = 0.514444;
inline constexpr double kFlightLevelMeters = 30.48;  // 1 FL = 100 ft
inline constexpr double kFpmMps = 0.3048 / 60.0;

constexpr double ft_to_m(double ft) { return ft * kFootMeters; }
constexpr double m_to_ft(double m) { return m / kFootMeters; }
constexpr double kt_to_mps(double kt) { return kt * kKnotMps; }
constexpr double mps_to_kt(double mps) { return mps / kKnotMps; }
constexpr double fl_to_m(double fl) { return fl * kFlightLevelMeters; }
constexpr double m_to_fl(double m) { return m / kFlightLevelMeters; }
constexpr double fpm_to_mps(double fpm) { return fpm * kFpmMps; }
constexpr double mps_to_fpm(double mps) { return mps / kFpmMps; }

}  // namespace climbtp::units
