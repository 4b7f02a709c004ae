#include "climbtp/integrator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "climbtp/units.hpp"

namespace climbtp {

namespace {

constexpr double kTimeTol = 1e-6;

struct ModelSlopes {
  const ClimbSchedule& schedule;
  const AircraftPerfModel& model;
  long* clamp_incidents;

  double roc(double /*t*/, double h, double v, const Mode& mode) const {
    return rate_of_climb(v, h, mode, schedule.params(), model);
  }
  double acc(double /*t*/, double v, double h, double hdot) const {
    bool clamped = false;
    const double a = acceleration(h, v, hdot, schedule.params(), model, &clamped);
    if (clamped && clamp_incidents != nullptr) ++(*clamp_incidents);
    return a;
  }
};

}  // namespace

State rk4_step(const State& s, double dt, const ClimbSchedule& schedule,
               const AircraftPerfModel& model, long* clamp_incidents) {
  if (!(dt > 0)) throw std::domain_error("rk4_step: dt must be positive");
  ModelSlopes slopes{schedule, model, clamp_incidents};
  auto step = rk4_step(
      s, dt, [&](double t, double h, double v, const Mode& q) { return slopes.roc(t, h, v, q); },
      [&](double t, double v, double h, double hdot) { return slopes.acc(t, v, h, hdot); },
      [&](double v, double h) { return schedule.mode_at(v, h); });
  return step.next;
}

State rk4_step(const State& s, double dt, const TuningParams& params,
               const DynamicsConfig& cfg, const AircraftPerfModel& model) {
  ClimbSchedule schedule(params, cfg);
  long* no_counter = nullptr;
  return rk4_step(s, dt, schedule, model, no_counter);
}

SimulationOutcome simulate(const TuningParams& params, const State& s0,
                           std::optional<double> level_fl, double horizon_s, double dt,
                           const DynamicsConfig& cfg, const AircraftPerfModel& model) {
  if (!(horizon_s > 0)) throw std::domain_error("simulate: horizon must be positive");
  if (!(dt > 0)) throw std::domain_error("simulate: dt must be positive");
  if (!(s0.v > 0)) throw std::domain_error("simulate: initial speed must be positive");

  const ClimbSchedule schedule(params, cfg);
  const double level_m =
      level_fl ? units::fl_to_m(*level_fl) : std::numeric_limits<double>::infinity();
  const double ceiling_m = model.ceiling_m();

  SimulationOutcome out;
  Trajectory& traj = out.trajectory;
  traj.t0 = s0.t;
  traj.dt = dt;
  traj.samples.reserve(static_cast<std::size_t>(horizon_s / dt) + 2);

  ModelSlopes slopes{schedule, model, &out.clamp_incidents};
  auto roc_fn = [&](double t, double h, double v, const Mode& q) {
    return slopes.roc(t, h, v, q);
  };
  auto acc_fn = [&](double t, double v, double h, double hdot) {
    return slopes.acc(t, v, h, hdot);
  };
  auto mode_fn = [&](double v, double h) { return schedule.mode_at(v, h); };

  State s = s0;
  s.mode = mode_fn(s.v, s.h);

  if (s.h >= level_m) {
    traj.samples.push_back({s.t, s.h, s.v, 0.0});
    out.termination = Termination::ReachedLevel;
    return out;
  }

  long k = 0;
  while (true) {
    const double t = s0.t + k * dt;
    if (t - s0.t >= horizon_s - kTimeTol) {
      traj.samples.push_back({t, s.h, s.v, roc_fn(t, s.h, s.v, s.mode)});
      out.termination = Termination::Horizon;
      break;
    }
    auto step = rk4_step(s, dt, roc_fn, acc_fn, mode_fn);
    traj.samples.push_back({t, s.h, s.v, step.initial_roc});
    const State& next = step.next;
    if (next.mode != s.mode) ++out.mode_switch_count;
    if (next.h >= level_m) {
      traj.samples.push_back({s0.t + (k + 1) * dt, level_m, next.v, 0.0});
      out.termination = Termination::ReachedLevel;
      break;
    }
    if (next.h >= ceiling_m) {
      traj.samples.push_back({s0.t + (k + 1) * dt, next.h, next.v, 0.0});
      out.termination = Termination::Ceiling;
      break;
    }
    s = next;
    ++k;
  }
  return out;
}

Trajectory resample(const Trajectory& traj, double dt_out) {
  if (traj.samples.empty()) throw std::domain_error("resample: empty trajectory");
  const double ratio = dt_out / traj.dt;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9) {
    throw std::domain_error("resample: dt_out must be an integer multiple of dt");
  }
  Trajectory out;
  out.t0 = traj.t0;
  out.dt = dt_out;
  for (std::size_t i = 0; i < traj.samples.size(); i += static_cast<std::size_t>(k)) {
    out.samples.push_back(traj.samples[i]);
  }
  return out;
}

AlignedAltitudes align_and_pad(const Trajectory& pred, const Trajectory& obs, double level_fl) {
  if (pred.samples.empty() || obs.samples.empty()) {
    throw std::domain_error("align_and_pad: empty trajectory");
  }
  if (std::abs(pred.dt - obs.dt) > kTimeTol) {
    throw std::domain_error("align_and_pad: sample intervals differ");
  }
  if (std::abs(pred.t0 - obs.t0) > kTimeTol) {
    throw std::domain_error("align_and_pad: epochs are not aligned");
  }
  const double level_m = units::fl_to_m(level_fl);
  const std::size_t n = std::max(pred.samples.size(), obs.samples.size());
  AlignedAltitudes out;
  out.pred_m.reserve(n);
  out.obs_m.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.pred_m.push_back(i < pred.samples.size() ? pred.samples[i].h : level_m);
    out.obs_m.push_back(i < obs.samples.size() ? obs.samples[i].h : level_m);
  }
  return out;
}

Trajectory extend_trajectory(const Trajectory& traj, double t_end) {
  if (traj.samples.empty()) throw std::domain_error("extend_trajectory: empty trajectory");
  Trajectory out = traj;
  const double last_h = traj.samples.back().h;
  const double last_v = traj.samples.back().v;
  while (out.samples.back().t < t_end - kTimeTol) {
    out.samples.push_back({out.samples.back().t + out.dt, last_h, last_v, 0.0});
  }
  return out;
}

}  // namespace climbtp
