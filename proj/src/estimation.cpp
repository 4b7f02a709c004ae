#include "climbtp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "climbtp/errors.hpp"
#include "climbtp/evaluation.hpp"
#include "climbtp/rng.hpp"
#include "climbtp/units.hpp"

namespace climbtp {

namespace {

constexpr double kSimDt = 1.0;         // internal integration step
constexpr double kSentinel = 1e9;      // objective value for failed simulations

std::array<Interval, 5> bounds_array(const ParamBounds& b) {
  return {b.mass_kg, b.temp_offset_K, b.v1_kt, b.v2_kt, b.mach};
}

std::array<double, 5> theta_array(const TuningParams& t) {
  return {t.mass_kg, t.temp_offset_K, t.v1_kt, t.v2_kt, t.mach};
}

TuningParams theta_from_array(const std::array<double, 5>& a) {
  return TuningParams{a[0], a[1], a[2], a[3], a[4]};
}

TuningParams clamp_into(const TuningParams& theta, const ParamBounds& bounds) {
  const auto b = bounds_array(bounds);
  auto a = theta_array(theta);
  for (std::size_t k = 0; k < 5; ++k) a[k] = std::clamp(a[k], b[k].lo, b[k].hi);
  return theta_from_array(a);
}

/// Altitudes of a simulated climb on the observation grid, exactly n points.
/// A run cut short by the ceiling is held at its final altitude; a numerical
/// failure yields an empty vector.
std::vector<double> simulated_altitudes(const TuningParams& theta, const State& s0,
                                        std::size_t n, double grid_dt,
                                        const DynamicsConfig& cfg,
                                        const AircraftPerfModel& model) {
  const double horizon = static_cast<double>(n - 1) * grid_dt;
  std::vector<double> out;
  try {
    SimulationOutcome sim =
        simulate(theta, s0, std::nullopt, std::max(horizon, kSimDt), kSimDt, cfg, model);
    Trajectory grid = resample(sim.trajectory, grid_dt);
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back(k < grid.samples.size() ? grid.samples[k].h : grid.samples.back().h);
    }
  } catch (const NumericalError&) {
    out.clear();
  }
  return out;
}

}  // namespace

void ParamBounds::validate() const {
  auto check = [](const Interval& iv, const char* key) {
    if (!(iv.lo < iv.hi)) {
      throw ConfigError(std::string("bounds config: ") + key + " requires low < high");
    }
  };
  check(mass_kg, "mass");
  check(temp_offset_K, "dT");
  check(v1_kt, "v1");
  check(v2_kt, "v2");
  check(mach, "mach");
  if (!(v1_kt.hi <= v2_kt.hi)) {
    throw ConfigError("bounds config: v1 upper bound must not exceed v2 upper bound");
  }
  if (!(v1_kt.lo > 0 && v2_kt.lo > 0 && mach.lo > 0)) {
    throw ConfigError("bounds config: speed bounds must be positive");
  }
}

void ParamBounds::validate_against(const AircraftPerfModel& model) const {
  validate();
  if (mass_kg.lo < model.mass_min_kg || mass_kg.hi > model.mass_max_kg) {
    throw ConfigError("bounds config: mass interval must lie within the aircraft mass range");
  }
}

std::array<double, 5> normalize(const TuningParams& theta, const ParamBounds& bounds) {
  const auto b = bounds_array(bounds);
  const auto a = theta_array(theta);
  std::array<double, 5> x{};
  for (std::size_t k = 0; k < 5; ++k) {
    if (a[k] < b[k].lo || a[k] > b[k].hi) {
      throw std::domain_error("normalize: parameter " + std::to_string(k) +
                              " outside its bounds");
    }
    x[k] = (a[k] - b[k].lo) / (b[k].hi - b[k].lo);
  }
  return x;
}

TuningParams denormalize(const std::array<double, 5>& x, const ParamBounds& bounds,
                         bool* repaired) {
  const auto b = bounds_array(bounds);
  std::array<double, 5> a{};
  for (std::size_t k = 0; k < 5; ++k) {
    a[k] = b[k].lo + x[k] * (b[k].hi - b[k].lo);
  }
  if (a[3] < a[2]) {  // v2 < v1
    a[3] = a[2];
    if (repaired != nullptr) *repaired = true;
  }
  return theta_from_array(a);
}

std::vector<double> linear_weights(int t) {
  if (t < 2) throw std::domain_error("linear_weights: need at least two points");
  std::vector<double> alpha(t);
  for (int i = 0; i < t; ++i) alpha[i] = static_cast<double>(i) / (t - 1);
  return alpha;
}

double padded_error_sum_fl(const Trajectory& pred, const Trajectory& obs, std::size_t i,
                           std::size_t j, double level_fl) {
  const AlignedAltitudes aligned = align_and_pad(pred, obs, level_fl);
  if (!(i < j) || j >= aligned.pred_m.size()) {
    throw std::domain_error("padded_error_sum_fl: index range outside padded length");
  }
  double sum = 0.0;
  for (std::size_t n = i; n <= j; ++n) {
    sum += std::abs(aligned.pred_m[n] - aligned.obs_m[n]) / units::kFlightLevelMeters;
  }
  return sum;
}

double offline_objective(const TuningParams& theta, const Trajectory& obs, const State& s0,
                         std::size_t i, std::size_t j, double level_fl,
                         const DynamicsConfig& cfg, const AircraftPerfModel& model) {
  try {
    SimulationOutcome sim =
        simulate(theta, s0, level_fl, obs.duration() + 60.0, kSimDt, cfg, model);
    Trajectory pred = resample(sim.trajectory, obs.dt);
    return padded_error_sum_fl(pred, obs, i, j, level_fl);
  } catch (const NumericalError&) {
    return kSentinel;
  }
}

FitResult fit_offline(const Trajectory& obs, const State& s0, const ParamBounds& bounds,
                      const CmaConfig& cma_cfg, const DynamicsConfig& cfg,
                      const AircraftPerfModel& model) {
  bounds.validate_against(model);
  const std::size_t toc = top_of_climb(obs);
  if (toc == 0) throw std::domain_error("fit_offline: top of climb at the first sample");
  const double level_fl = units::m_to_fl(obs.samples[toc].h);

  auto objective = [&](const std::vector<double>& xv) {
    std::array<double, 5> x{};
    std::copy_n(xv.begin(), 5, x.begin());
    const TuningParams theta = denormalize(x, bounds, nullptr);
    return offline_objective(theta, obs, s0, 0, toc, level_fl, cfg, model);
  };

  const TuningParams theta_default = clamp_into(default_params(model), bounds);
  CmaConfig run_cfg = cma_cfg;
  run_cfg.dimension = 5;
  const auto x0 = normalize(theta_default, bounds);
  run_cfg.initial_mean.assign(x0.begin(), x0.end());

  OptResult opt = minimize(objective, run_cfg);
  if (opt.x_best.empty()) {
    throw OptimizationError("fit_offline: optimizer returned no candidate");
  }
  std::array<double, 5> xb{};
  std::copy_n(opt.x_best.begin(), 5, xb.begin());
  FitResult result;
  result.theta = denormalize(xb, bounds, nullptr);
  result.objective = opt.f_best;
  result.evals = opt.evals_used;
  return result;
}

double online_objective(const TuningParams& theta, const Trajectory& obs_prefix,
                        const State& s0, std::span<const double> alpha, double lambda,
                        const TuningParams& theta_default, const ParamBounds& bounds,
                        const DynamicsConfig& cfg, const AircraftPerfModel& model) {
  if (alpha.size() != obs_prefix.samples.size()) {
    throw std::domain_error("online_objective: weight vector length mismatch");
  }
  const std::vector<double> pred =
      simulated_altitudes(theta, s0, obs_prefix.samples.size(), obs_prefix.dt, cfg, model);
  if (pred.empty()) return kSentinel;

  double error = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    error += alpha[k] * std::abs(pred[k] - obs_prefix.samples[k].h) / units::kFlightLevelMeters;
  }
  const auto x = normalize(theta, bounds);
  const auto xd = normalize(clamp_into(theta_default, bounds), bounds);
  double penalty = 0.0;
  for (std::size_t k = 0; k < 5; ++k) penalty += std::abs(x[k] - xd[k]);
  return error + lambda * penalty;
}

OnlinePrediction predict_online(const Trajectory& obs_prefix, const State& s0,
                                const ParamBounds& bounds, const OnlineConfig& online_cfg,
                                const CmaConfig& cma_cfg, double horizon_s,
                                const DynamicsConfig& cfg, const AircraftPerfModel& model) {
  bounds.validate_against(model);
  const std::size_t total = obs_prefix.samples.size();
  const std::size_t v_points = static_cast<std::size_t>(online_cfg.validation_points);
  if (total <= v_points + 10) {
    throw PrefixTooShortError("predict_online: prefix of " + std::to_string(total) +
                              " samples needs more than " + std::to_string(v_points + 10));
  }

  Trajectory learning;
  learning.t0 = obs_prefix.t0;
  learning.dt = obs_prefix.dt;
  learning.samples.assign(obs_prefix.samples.begin(),
                          obs_prefix.samples.end() - static_cast<long>(v_points));
  const std::vector<double> alpha = linear_weights(static_cast<int>(learning.samples.size()));

  const TuningParams theta_default = clamp_into(default_params(model), bounds);
  const auto xd = normalize(theta_default, bounds);

  FitResult best;
  best.theta = theta_default;
  double best_val_err = std::numeric_limits<double>::infinity();
  long total_evals = 0;

  double lambda = online_cfg.lambda0;
  for (int k = 0; k <= online_cfg.max_lambda_doublings; ++k) {
    auto objective = [&](const std::vector<double>& xv) {
      std::array<double, 5> x{};
      std::copy_n(xv.begin(), 5, x.begin());
      const TuningParams theta = denormalize(x, bounds, nullptr);
      return online_objective(theta, learning, s0, alpha, lambda, theta_default, bounds, cfg,
                              model);
    };

    CmaConfig run_cfg = cma_cfg;
    run_cfg.dimension = 5;
    run_cfg.max_evals = online_cfg.evals_budget;
    run_cfg.seed = mix_seed(cma_cfg.seed, static_cast<std::uint64_t>(k));
    run_cfg.initial_mean.assign(xd.begin(), xd.end());

    OptResult opt = minimize(objective, run_cfg);
    total_evals += opt.evals_used;
    if (opt.x_best.empty()) continue;

    std::array<double, 5> xb{};
    std::copy_n(opt.x_best.begin(), 5, xb.begin());
    const TuningParams theta_k = denormalize(xb, bounds, nullptr);

    // Unweighted held-out score over the validation window.
    const std::vector<double> pred =
        simulated_altitudes(theta_k, s0, total, obs_prefix.dt, cfg, model);
    double val_err = std::numeric_limits<double>::infinity();
    if (!pred.empty()) {
      double sum = 0.0;
      for (std::size_t n = total - v_points; n < total; ++n) {
        sum += std::abs(pred[n] - obs_prefix.samples[n].h) / units::kFlightLevelMeters;
      }
      val_err = sum / static_cast<double>(v_points);
    }
    if (val_err < best_val_err) {
      best_val_err = val_err;
      best.theta = theta_k;
      best.lambda_used = lambda;
    }

    // The penalty is strong enough that the fit no longer leaves the
    // nominal vector; growing lambda further cannot change anything.
    double max_dev = 0.0;
    for (std::size_t d = 0; d < 5; ++d) max_dev = std::max(max_dev, std::abs(xb[d] - xd[d]));
    if (max_dev < 1e-3) break;

    lambda *= online_cfg.lambda_growth;
  }

  FitResult fit = best;
  fit.evals = total_evals;
  fit.objective = best_val_err;
  if (!(best_val_err <= online_cfg.fallback_threshold_fl)) {
    fit.theta = theta_default;
    fit.lambda_used = std::nullopt;
    fit.fell_back_to_default = true;
  }

  SimulationOutcome sim =
      simulate(fit.theta, s0, std::nullopt, horizon_s, kSimDt, cfg, model);
  OnlinePrediction result;
  result.fit = fit;
  result.prediction = resample(sim.trajectory, obs_prefix.dt);
  return result;
}

}  // namespace climbtp
