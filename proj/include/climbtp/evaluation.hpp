#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "climbtp/estimation.hpp"
#include "climbtp/integrator.hpp"

namespace climbtp {

struct LabeledTrajectory {
  std::string id;
  Trajectory trajectory;
};
using Dataset = std::vector<LabeledTrajectory>;

/// Where prediction errors are sampled: fixed offsets (minutes) after either
/// the takeoff epoch or the present time of an online slice.
struct MeteringSpec {
  enum class Reference { Takeoff, CurrentTime } reference = Reference::Takeoff;
  std::vector<double> offsets_min;
};

struct ReportRow {
  double offset_min = 0;
  double mean_nominal_fl = 0;
  double std_nominal_fl = 0;
  double mean_tuned_fl = 0;
  double std_tuned_fl = 0;
  double p_value = 1;
};

struct EvaluationReport {
  double slice_s = 0;  // 0 for the whole-trajectory experiment
  std::vector<ReportRow> rows;
  double default_choice_ratio = 0;
  int n_trajectories = 0;
};

/// Index of the first sample attaining the maximum altitude.
std::size_t top_of_climb(const Trajectory& traj);

struct RejectedTrajectory {
  std::string id;
  std::string reason;
};

/// Keep trajectories that look like uninterrupted climbs: no zero-climb-rate
/// run spanning more than 30 s before the top of climb, a cruise of at least
/// FL300, and a duration of at least 1100 s.
std::pair<Dataset, std::vector<RejectedTrajectory>> filter_dataset(const Dataset& trajs);

/// Absolute altitude gaps in FL at t_ref + each offset, which must land
/// exactly on the shared sample grid and be covered by both trajectories.
std::vector<double> metering_errors(const Trajectory& pred, const Trajectory& obs,
                                    const MeteringSpec& spec, double t_ref);

/// Arithmetic mean and sample standard deviation (n-1 denominator; 0 when a
/// single value is given).
std::pair<double, double> summarize(std::span<const double> values);

enum class WilcoxonMethod { Auto, Exact, NormalApprox };

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; ties get average ranks. Auto uses exact enumeration of the
/// 2^n sign assignments up to n = 20 and the tie-corrected normal
/// approximation with continuity correction beyond.
double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                            WilcoxonMethod method = WilcoxonMethod::Auto);

/// Whole-trajectory experiment: per flight, one nominal-parameter prediction
/// and one prediction after the full-information fit; errors at the metering
/// offsets after takeoff; aggregate statistics plus a paired test per row.
EvaluationReport run_offline_experiment(const Dataset& dataset, const ParamBounds& bounds,
                                        const CmaConfig& cma_cfg, const MeteringSpec& spec,
                                        const DynamicsConfig& cfg,
                                        const AircraftPerfModel& model, unsigned jobs = 0);

/// Online experiment: per flight and time slice P, the online predictor sees
/// the first P seconds and extrapolates; errors at the metering offsets
/// after P for the tuned and the nominal prediction, plus the fraction of
/// fits rejected in favor of the nominal parameters.
std::vector<EvaluationReport> run_online_experiment(
    const Dataset& dataset, const std::vector<double>& slices_s,
    const OnlineConfig& online_cfg, const ParamBounds& bounds, const CmaConfig& cma_cfg,
    const MeteringSpec& spec, const DynamicsConfig& cfg, const AircraftPerfModel& model,
    unsigned jobs = 0);

/// Plain-text table (offset | nominal mean (std) | tuned mean (std) | p).
std::string render_report_table(const std::vector<EvaluationReport>& reports);

/// Machine-readable form, one row per (slice, offset).
std::string render_report_csv(const std::vector<EvaluationReport>& reports);

}  // namespace climbtp
