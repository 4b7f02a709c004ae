#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <vector>

#include "climbtp/dynamics.hpp"
#include "climbtp/errors.hpp"

namespace climbtp {

struct Sample {
  double t = 0;    // s
  double h = 0;    // m
  double v = 0;    // m/s TAS
  double roc = 0;  // m/s
};

/// Uniformly sampled altitude/speed/climb-rate series.
struct Trajectory {
  double t0 = 0;
  double dt = 0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  double end_time() const { return samples.back().t; }
  double duration() const { return samples.back().t - samples.front().t; }
};

enum class Termination { ReachedLevel, Horizon, Ceiling };

struct SimulationOutcome {
  Trajectory trajectory;
  Termination termination = Termination::Horizon;
  long clamp_incidents = 0;
  long mode_switch_count = 0;
};

/// One fourth-order Runge-Kutta step of the coupled (h, v) system with the
/// discrete mode re-derived at each slope point. Each acceleration slope is
/// fed the climb-rate slope evaluated at the same point. Parameterized over
/// the slope functions so stub systems can exercise the scheme directly.
///
///   roc_fn(t, h, v, mode) -> dh/dt
///   acc_fn(t, v, h, hdot) -> dv/dt
///   mode_fn(v, h)         -> Mode
///
/// Returns the advanced state plus the first climb-rate slope (the rate at
/// the step's start point). Throws NumericalError on non-finite values.
struct StepOutput {
  State next;
  double initial_roc;
};

template <typename F1, typename F2, typename ModeFn>
  requires std::invocable<F1&, double, double, double, const Mode&> &&
           std::invocable<F2&, double, double, double, double> &&
           std::invocable<ModeFn&, double, double>
StepOutput rk4_step(const State& s, double dt, F1&& roc_fn, F2&& acc_fn, ModeFn&& mode_fn) {
  const double t = s.t, h = s.h, v = s.v;
  const double half = 0.5 * dt;

  const double dh1 = roc_fn(t, h, v, mode_fn(v, h));
  const double dv1 = acc_fn(t, v, h, dh1);
  const double dh2 = roc_fn(t + half, h + dh1 * half, v + dv1 * half,
                            mode_fn(v + dv1 * half, h + dh1 * half));
  const double dv2 = acc_fn(t + half, v + dv1 * half, h + dh1 * half, dh2);
  const double dh3 = roc_fn(t + half, h + dh2 * half, v + dv2 * half,
                            mode_fn(v + dv2 * half, h + dh2 * half));
  const double dv3 = acc_fn(t + half, v + dv2 * half, h + dh2 * half, dh3);
  const double dh4 =
      roc_fn(t + dt, h + dh3 * dt, v + dv3 * dt, mode_fn(v + dv3 * dt, h + dh3 * dt));
  const double dv4 = acc_fn(t + dt, v + dv3 * dt, h + dh3 * dt, dh4);

  State next;
  next.t = t + dt;
  next.h = h + dt / 6.0 * (dh1 + 2.0 * dh2 + 2.0 * dh3 + dh4);
  next.v = v + dt / 6.0 * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4);
  if (!std::isfinite(next.h) || !std::isfinite(next.v)) {
    throw NumericalError("non-finite state after integration step", t, h, v);
  }
  next.mode = mode_fn(next.v, next.h);
  return {next, dh1};
}

/// Full-model step: slopes from rate_of_climb / acceleration over a prepared
/// schedule. Clamp incidents of the flight-path angle accumulate into
/// `clamp_incidents` when provided.
State rk4_step(const State& s, double dt, const ClimbSchedule& schedule,
               const AircraftPerfModel& model, long* clamp_incidents = nullptr);

/// Convenience overload matching the free-function dynamics API.
State rk4_step(const State& s, double dt, const TuningParams& params,
               const DynamicsConfig& cfg, const AircraftPerfModel& model);

/// Integrate from s0 with step dt, recording one sample per step, until the
/// level altitude is reached (final sample clamped exactly onto it), the
/// horizon elapses, or the aircraft ceiling is hit. Pure function of its
/// arguments: identical inputs give bitwise-identical output.
SimulationOutcome simulate(const TuningParams& params, const State& s0,
                           std::optional<double> level_fl, double horizon_s, double dt,
                           const DynamicsConfig& cfg, const AircraftPerfModel& model);

/// Keep every (dt_out/dt)-th sample starting at index 0. dt_out must be an
/// integer multiple of the input spacing.
Trajectory resample(const Trajectory& traj, double dt_out);

/// Equal-length altitude sequences for error sums: the shorter trajectory is
/// extended with the level altitude. Requires equal spacing and epochs.
struct AlignedAltitudes {
  std::vector<double> pred_m;
  std::vector<double> obs_m;
};
AlignedAltitudes align_and_pad(const Trajectory& pred, const Trajectory& obs, double level_fl);

/// Extend a trajectory to cover t_end by repeating its final altitude with
/// zero climb rate. No-op when already covered.
Trajectory extend_trajectory(const Trajectory& traj, double t_end);

}  // namespace climbtp
