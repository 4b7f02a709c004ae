#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "climbtp/cmaes.hpp"
#include "climbtp/integrator.hpp"

namespace climbtp {

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Box bounds of the five tuned parameters.
struct ParamBounds {
  Interval mass_kg;
  Interval temp_offset_K;
  Interval v1_kt;
  Interval v2_kt;
  Interval mach;

  /// Internal consistency; throws ConfigError naming the key. Requires
  /// v1.hi <= v2.hi so the v2 >= v1 repair cannot leave the box.
  void validate() const;
  /// Mass bounds must sit inside the aircraft's certified mass range.
  void validate_against(const AircraftPerfModel& model) const;
};

struct FitResult {
  TuningParams theta;
  double objective = 0;  // FL sum offline; validation mean FL online
  long evals = 0;
  std::optional<double> lambda_used;
  bool fell_back_to_default = false;
};

/// Online predictor configuration.
struct OnlineConfig {
  int validation_points = 36;        // samples held out just before the present
  double lambda0 = 100.0;            // initial regularization weight
  double lambda_growth = 2.0;
  double fallback_threshold_fl = 5.0;
  long evals_budget = 1000;          // optimizer budget per lambda fit
  int max_lambda_doublings = 12;
  enum class WeightScheme { Linear } weight_scheme = WeightScheme::Linear;
};

/// Coordinate-wise affine map of a parameter vector into [0,1]^5 (order:
/// mass, temperature offset, v1, v2, mach). Throws std::domain_error when
/// theta is outside the bounds.
std::array<double, 5> normalize(const TuningParams& theta, const ParamBounds& bounds);

/// Inverse map. A candidate with v2 < v1 is repaired to v2 := v1 and the
/// flag is set when provided.
TuningParams denormalize(const std::array<double, 5>& x, const ParamBounds& bounds,
                         bool* repaired = nullptr);

/// Linearly increasing weights 0 .. 1 over t points; t must be >= 2.
std::vector<double> linear_weights(int t);

/// Sum of absolute altitude gaps in flight levels over the inclusive index
/// range [i, j] after level padding of the shorter series.
double padded_error_sum_fl(const Trajectory& pred, const Trajectory& obs, std::size_t i,
                           std::size_t j, double level_fl);

/// Whole-trajectory objective: simulate theta from s0 with termination at
/// level_fl, compare on the observation grid, sum absolute gaps over [i, j]
/// in FL. Numerical failures return a large finite sentinel (1e9) so the
/// optimizer can keep going.
double offline_objective(const TuningParams& theta, const Trajectory& obs, const State& s0,
                         std::size_t i, std::size_t j, double level_fl,
                         const DynamicsConfig& cfg, const AircraftPerfModel& model);

/// Fit all five parameters on the full climb (index 0 to the top of climb),
/// warm-started at the nominal vector.
FitResult fit_offline(const Trajectory& obs, const State& s0, const ParamBounds& bounds,
                      const CmaConfig& cma_cfg, const DynamicsConfig& cfg,
                      const AircraftPerfModel& model);

/// Weighted prefix error plus regularization toward the nominal parameters.
/// The penalty is computed in normalized coordinates, so lambda is unit-free
/// across kg, K, kt and Mach; alpha must match the prefix length. The
/// simulation runs to the prefix horizon with no level termination.
double online_objective(const TuningParams& theta, const Trajectory& obs_prefix,
                        const State& s0, std::span<const double> alpha, double lambda,
                        const TuningParams& theta_default, const ParamBounds& bounds,
                        const DynamicsConfig& cfg, const AircraftPerfModel& model);

struct OnlinePrediction {
  FitResult fit;
  Trajectory prediction;  // 5 s grid from s0 through the horizon
};

/// Online predictor: split the observed prefix into learning and validation
/// sets (the validation set is the last validation_points samples), fit the
/// parameters on the learning set for a growing ladder of regularization
/// weights, score each fit on the held-out window, keep the best, and fall
/// back to the nominal vector outright when even the best validation error
/// exceeds the threshold. Throws PrefixTooShortError when fewer than
/// validation_points + 10 samples are available.
OnlinePrediction predict_online(const Trajectory& obs_prefix, const State& s0,
                                const ParamBounds& bounds, const OnlineConfig& online_cfg,
                                const CmaConfig& cma_cfg, double horizon_s,
                                const DynamicsConfig& cfg, const AircraftPerfModel& model);

}  // namespace climbtp
