#include "climbtp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "climbtp/errors.hpp"
#include "climbtp/parallel.hpp"
#include "climbtp/rng.hpp"
#include "climbtp/units.hpp"

namespace climbtp {

namespace {

constexpr double kTimeTol = 1e-6;
constexpr double kZeroRocTol = 1e-9;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Average ranks of |d| (ascending), ties averaged; exact-equality grouping.
std::vector<double> average_ranks(const std::vector<double>& abs_d) {
  const std::size_t n = abs_d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

/// Exact two-sided p: share of the 2^n equiprobable sign assignments whose
/// smaller signed-rank sum does not exceed the observed one. Counted with a
/// subset-sum distribution over doubled (integer) ranks.
double wilcoxon_exact_p(const std::vector<double>& ranks, double w_min) {
  const std::size_t n = ranks.size();
  std::vector<long> r2(n);
  long total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = std::lround(2.0 * ranks[i]);
    total2 += r2[i];
  }
  std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
  count[0] = 1.0;
  long reached = 0;
  for (std::size_t i = 0; i < n; ++i) {
    reached += r2[i];
    for (long s = reached; s >= r2[i]; --s) {
      count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r2[i])];
    }
  }
  const long w2 = std::lround(2.0 * w_min);
  double favorable = 0.0;
  for (long s = 0; s <= total2; ++s) {
    if (std::min(s, total2 - s) <= w2) favorable += count[static_cast<std::size_t>(s)];
  }
  return favorable / std::pow(2.0, static_cast<double>(n));
}

double wilcoxon_normal_p(const std::vector<double>& ranks, double w_min) {
  const double n = static_cast<double>(ranks.size());
  const double mean_w = n * (n + 1.0) / 4.0;
  // Tie correction over groups of equal ranks.
  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += (t * t * t - t);
    i = j + 1;
  }
  const double var_w = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (w_min - mean_w + 0.5) / std::sqrt(var_w);
  return std::min(1.0, 2.0 * normal_cdf(z));
}

double flight_level_at(const Trajectory& traj, double t) {
  const double pos = (t - traj.t0) / traj.dt;
  const long idx = std::lround(pos);
  if (std::abs(pos - static_cast<double>(idx)) > kTimeTol) {
    throw std::domain_error("metering point does not land on the sample grid");
  }
  if (idx < 0 || static_cast<std::size_t>(idx) >= traj.samples.size()) {
    throw std::domain_error("metering point not covered by trajectory");
  }
  return units::m_to_fl(traj.samples[static_cast<std::size_t>(idx)].h);
}

State initial_state(const Trajectory& obs) {
  State s0;
  s0.t = obs.samples.front().t;
  s0.h = obs.samples.front().h;
  s0.v = obs.samples.front().v;
  return s0;
}

struct PairedErrors {
  std::vector<double> nominal;
  std::vector<double> tuned;
};

EvaluationReport aggregate(const std::vector<PairedErrors>& per_flight,
                           const MeteringSpec& spec, double slice_s, int fallbacks) {
  EvaluationReport report;
  report.slice_s = slice_s;
  report.n_trajectories = static_cast<int>(per_flight.size());
  if (report.n_trajectories > 0) {
    report.default_choice_ratio =
        static_cast<double>(fallbacks) / static_cast<double>(report.n_trajectories);
  }
  for (std::size_t row = 0; row < spec.offsets_min.size(); ++row) {
    std::vector<double> nominal, tuned;
    nominal.reserve(per_flight.size());
    tuned.reserve(per_flight.size());
    for (const auto& pe : per_flight) {
      nominal.push_back(pe.nominal[row]);
      tuned.push_back(pe.tuned[row]);
    }
    ReportRow r;
    r.offset_min = spec.offsets_min[row];
    std::tie(r.mean_nominal_fl, r.std_nominal_fl) = summarize(nominal);
    std::tie(r.mean_tuned_fl, r.std_tuned_fl) = summarize(tuned);
    r.p_value = wilcoxon_signed_rank(nominal, tuned);
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace

std::size_t top_of_climb(const Trajectory& traj) {
  if (traj.samples.empty()) throw std::domain_error("top_of_climb: empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    if (traj.samples[i].h > traj.samples[best].h) best = i;
  }
  return best;
}

std::pair<Dataset, std::vector<RejectedTrajectory>> filter_dataset(const Dataset& trajs) {
  Dataset kept;
  std::vector<RejectedTrajectory> rejected;
  for (const auto& lt : trajs) {
    const Trajectory& t = lt.trajectory;
    if (t.samples.empty()) {
      rejected.push_back({lt.id, "empty"});
      continue;
    }
    const std::size_t toc = top_of_climb(t);
    if (units::m_to_fl(t.samples[toc].h) < 300.0) {
      rejected.push_back({lt.id, "cruise below FL300"});
      continue;
    }
    if (t.duration() < 1100.0) {
      rejected.push_back({lt.id, "duration below 1100 s"});
      continue;
    }
    // Zero-climb-rate run before the top of climb spanning more than 30 s.
    bool level_off = false;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i < toc && !level_off; ++i) {
      if (std::abs(t.samples[i].roc) <= kZeroRocTol) {
        if (!in_run) {
          in_run = true;
          run_start = i;
        }
        if (static_cast<double>(i - run_start) * t.dt > 30.0) level_off = true;
      } else {
        in_run = false;
      }
    }
    if (level_off) {
      rejected.push_back({lt.id, "zero climb rate for more than 30 s"});
      continue;
    }
    kept.push_back(lt);
  }
  return {kept, rejected};
}

std::vector<double> metering_errors(const Trajectory& pred, const Trajectory& obs,
                                    const MeteringSpec& spec, double t_ref) {
  std::vector<double> errors;
  errors.reserve(spec.offsets_min.size());
  for (double off_min : spec.offsets_min) {
    const double t = t_ref + off_min * 60.0;
    errors.push_back(std::abs(flight_level_at(pred, t) - flight_level_at(obs, t)));
  }
  return errors;
}

std::pair<double, double> summarize(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("summarize: empty sample");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                            WilcoxonMethod method) {
  if (a.size() != b.size()) {
    throw std::domain_error("wilcoxon_signed_rank: paired samples differ in size");
  }
  if (a.size() < 5) {
    throw std::domain_error("wilcoxon_signed_rank: need at least 5 pairs");
  }
  std::vector<double> abs_d;
  std::vector<int> sign;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    sign.push_back(d > 0 ? 1 : -1);
  }
  if (abs_d.empty()) return 1.0;

  const std::vector<double> ranks = average_ranks(abs_d);
  double w_pos = 0.0, w_neg = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    (sign[i] > 0 ? w_pos : w_neg) += ranks[i];
  }
  const double w_min = std::min(w_pos, w_neg);

  const bool exact = (method == WilcoxonMethod::Exact) ||
                     (method == WilcoxonMethod::Auto && ranks.size() <= 20);
  return exact ? wilcoxon_exact_p(ranks, w_min) : wilcoxon_normal_p(ranks, w_min);
}

EvaluationReport run_offline_experiment(const Dataset& dataset, const ParamBounds& bounds,
                                        const CmaConfig& cma_cfg, const MeteringSpec& spec,
                                        const DynamicsConfig& cfg,
                                        const AircraftPerfModel& model, unsigned jobs) {
  if (dataset.empty()) throw std::domain_error("run_offline_experiment: empty dataset");
  const double max_offset_s =
      *std::max_element(spec.offsets_min.begin(), spec.offsets_min.end()) * 60.0;
  const TuningParams nominal = default_params(model);

  std::vector<PairedErrors> per_flight(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    const Trajectory& obs = dataset[i].trajectory;
    const State s0 = initial_state(obs);
    const double level_fl = units::m_to_fl(obs.samples[top_of_climb(obs)].h);
    const double t_end = s0.t + max_offset_s;
    const double horizon = std::max(obs.duration(), max_offset_s) + 120.0;

    auto predict = [&](const TuningParams& theta) {
      SimulationOutcome sim = simulate(theta, s0, level_fl, horizon, 1.0, cfg, model);
      return extend_trajectory(resample(sim.trajectory, obs.dt), t_end);
    };

    CmaConfig flight_cfg = cma_cfg;
    flight_cfg.seed = mix_seed(cma_cfg.seed, static_cast<std::uint64_t>(i));
    const FitResult fit = fit_offline(obs, s0, bounds, flight_cfg, cfg, model);

    const Trajectory obs_padded = extend_trajectory(obs, t_end);
    per_flight[i].nominal = metering_errors(predict(nominal), obs_padded, spec, s0.t);
    per_flight[i].tuned = metering_errors(predict(fit.theta), obs_padded, spec, s0.t);
  });

  return aggregate(per_flight, spec, 0.0, 0);
}

std::vector<EvaluationReport> run_online_experiment(
    const Dataset& dataset, const std::vector<double>& slices_s,
    const OnlineConfig& online_cfg, const ParamBounds& bounds, const CmaConfig& cma_cfg,
    const MeteringSpec& spec, const DynamicsConfig& cfg, const AircraftPerfModel& model,
    unsigned jobs) {
  if (dataset.empty()) throw std::domain_error("run_online_experiment: empty dataset");
  const double max_offset_s =
      *std::max_element(spec.offsets_min.begin(), spec.offsets_min.end()) * 60.0;
  const TuningParams nominal = default_params(model);

  std::vector<EvaluationReport> reports;
  for (std::size_t si = 0; si < slices_s.size(); ++si) {
    const double slice = slices_s[si];
    std::vector<PairedErrors> per_flight(dataset.size());
    std::vector<int> fell_back(dataset.size(), 0);

    parallel_for(dataset.size(), jobs, [&](std::size_t i) {
      const Trajectory& obs = dataset[i].trajectory;
      const State s0 = initial_state(obs);
      const double t_ref = s0.t + slice;
      const double t_end = t_ref + max_offset_s;

      Trajectory prefix;
      prefix.t0 = obs.t0;
      prefix.dt = obs.dt;
      for (const Sample& s : obs.samples) {
        if (s.t <= t_ref + kTimeTol) prefix.samples.push_back(s);
      }

      CmaConfig flight_cfg = cma_cfg;
      flight_cfg.seed =
          mix_seed(cma_cfg.seed, static_cast<std::uint64_t>(i * 1000 + si));
      const double horizon = slice + max_offset_s + 60.0;
      const OnlinePrediction online = predict_online(prefix, s0, bounds, online_cfg,
                                                     flight_cfg, horizon, cfg, model);
      fell_back[i] = online.fit.fell_back_to_default ? 1 : 0;

      SimulationOutcome nom_sim = simulate(nominal, s0, std::nullopt, horizon, 1.0, cfg, model);
      const Trajectory nominal_pred =
          extend_trajectory(resample(nom_sim.trajectory, obs.dt), t_end);
      const Trajectory tuned_pred = extend_trajectory(online.prediction, t_end);
      const Trajectory obs_padded = extend_trajectory(obs, t_end);

      per_flight[i].nominal = metering_errors(nominal_pred, obs_padded, spec, t_ref);
      per_flight[i].tuned = metering_errors(tuned_pred, obs_padded, spec, t_ref);
    });

    const int fallbacks = std::accumulate(fell_back.begin(), fell_back.end(), 0);
    reports.push_back(aggregate(per_flight, spec, slice, fallbacks));
  }
  return reports;
}

std::string render_report_table(const std::vector<EvaluationReport>& reports) {
  std::string out;
  char line[256];
  for (const auto& rep : reports) {
    if (rep.slice_s > 0) {
      std::snprintf(line, sizeof line, "Time slice P = %.0f s   (n = %d, default choice ratio = %.3f)\n",
                    rep.slice_s, rep.n_trajectories, rep.default_choice_ratio);
    } else {
      std::snprintf(line, sizeof line, "Whole-trajectory fit   (n = %d)\n", rep.n_trajectories);
    }
    out += line;
    out += "  Offset    Nominal (FL)          Tuned (FL)            p-value\n";
    for (const auto& r : rep.rows) {
      std::snprintf(line, sizeof line, "  %4.0fmin   %8.4f (%8.4f)   %8.4f (%8.4f)   %.6g\n",
                    r.offset_min, r.mean_nominal_fl, r.std_nominal_fl, r.mean_tuned_fl,
                    r.std_tuned_fl, r.p_value);
      out += line;
    }
    out += "\n";
  }
  return out;
}

std::string render_report_csv(const std::vector<EvaluationReport>& reports) {
  std::string out =
      "slice_s,offset_min,mean_nominal_fl,std_nominal_fl,mean_tuned_fl,std_tuned_fl,"
      "p_value,default_ratio,n\n";
  char line[256];
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                    rep.slice_s, r.offset_min, r.mean_nominal_fl, r.std_nominal_fl,
                    r.mean_tuned_fl, r.std_tuned_fl, r.p_value, rep.default_choice_ratio,
                    rep.n_trajectories);
      out += line;
    }
  }
  return out;
}

}  // namespace climbtp
