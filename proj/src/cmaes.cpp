#include "climbtp/cmaes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "climbtp/errors.hpp"
#include "climbtp/rng.hpp"

namespace climbtp {

namespace {

int default_population(int n) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

}  // namespace

struct Cmaes::Impl {
  CmaConfig cfg;
  int n;
  int lambda;
  int mu;
  Eigen::VectorXd weights;
  double mu_eff;
  double c_sigma, d_sigma, c_c, c1, c_mu, chi_n;

  Rng rng;
  Eigen::VectorXd mean;
  double sigma;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd eigen_basis;   // B
  Eigen::VectorXd eigen_scale;   // D (sqrt of eigenvalues)
  Eigen::VectorXd path_sigma;
  Eigen::VectorXd path_cov;
  long gen = 0;
  long evals = 0;

  bool ask_pending = false;
  bool injected_start = false;
  std::vector<Eigen::VectorXd> sampled;   // raw candidates
  std::vector<Eigen::VectorXd> repaired;  // clamped candidates

  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  long last_improvement_gen = 0;

  explicit Impl(const CmaConfig& c)
      : cfg(c),
        n(c.dimension),
        lambda(c.population > 0 ? c.population : default_population(c.dimension)),
        rng(c.seed) {
    if (n < 1) throw std::invalid_argument("cmaes: dimension must be >= 1");
    if (lambda < 4) throw std::invalid_argument("cmaes: population must be >= 4");
    if (!(c.sigma0 > 0)) throw std::invalid_argument("cmaes: sigma0 must be positive");

    mu = lambda / 2;
    weights.resize(mu);
    for (int i = 0; i < mu; ++i) {
      weights[i] = std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
    }
    weights /= weights.sum();
    mu_eff = 1.0 / weights.squaredNorm();

    c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
    d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
    c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
    c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
    c_mu = std::min(1.0 - c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
    chi_n = std::sqrt(static_cast<double>(n)) *
            (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    if (!cfg.initial_mean.empty() && static_cast<int>(cfg.initial_mean.size()) != n) {
      throw std::invalid_argument("cmaes: initial_mean size mismatch");
    }
    if (cfg.initial_mean.empty()) {
      mean = Eigen::VectorXd::Constant(n, 0.5);
    } else {
      mean = Eigen::Map<const Eigen::VectorXd>(cfg.initial_mean.data(), n);
    }
    sigma = cfg.sigma0;
    cov = Eigen::MatrixXd::Identity(n, n);
    eigen_basis = Eigen::MatrixXd::Identity(n, n);
    eigen_scale = Eigen::VectorXd::Ones(n);
    path_sigma = Eigen::VectorXd::Zero(n);
    path_cov = Eigen::VectorXd::Zero(n);
  }

  void decompose() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd evals_vec = solver.eigenvalues();
    eigen_basis = solver.eigenvectors();
    const double ev_max = evals_vec.maxCoeff();
    const double floor_ev = ev_max / 1e14;
    bool repaired_any = false;
    for (int i = 0; i < n; ++i) {
      if (evals_vec[i] < floor_ev) {
        evals_vec[i] = floor_ev;
        repaired_any = true;
      }
    }
    if (repaired_any) {
      cov = eigen_basis * evals_vec.asDiagonal() * eigen_basis.transpose();
    }
    eigen_scale = evals_vec.cwiseSqrt();
  }

  std::vector<std::vector<double>> ask() {
    if (ask_pending) throw std::logic_error("cmaes: ask() called twice without tell()");
    decompose();
    sampled.clear();
    repaired.clear();
    sampled.reserve(lambda);
    repaired.reserve(lambda);
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd x;
      if (!injected_start && k == 0) {
        x = mean;
      } else {
        Eigen::VectorXd z(n);
        for (int d = 0; d < n; ++d) z[d] = rng.normal();
        x = mean + sigma * (eigen_basis * (eigen_scale.asDiagonal() * z));
      }
      sampled.push_back(x);
      repaired.push_back(x.cwiseMax(0.0).cwiseMin(1.0));
    }
    injected_start = true;
    ask_pending = true;
    std::vector<std::vector<double>> out(lambda);
    for (int k = 0; k < lambda; ++k) {
      out[k].assign(repaired[k].data(), repaired[k].data() + n);
    }
    return out;
  }

  void tell(const std::vector<double>& values) {
    if (!ask_pending) throw std::logic_error("cmaes: tell() without a pending ask()");
    if (static_cast<int>(values.size()) != lambda) {
      throw std::logic_error("cmaes: tell() received " + std::to_string(values.size()) +
                             " values for a population of " + std::to_string(lambda));
    }
    for (int k = 0; k < lambda; ++k) {
      if (!std::isfinite(values[k])) {
        throw OptimizationError("cmaes: non-finite objective value for candidate " +
                                std::to_string(k));
      }
    }
    ask_pending = false;
    evals += lambda;

    // Rank by value plus repair penalty; index tiebreak keeps determinism.
    std::vector<double> ranked(lambda);
    for (int k = 0; k < lambda; ++k) {
      const double dist2 = (sampled[k] - repaired[k]).squaredNorm();
      ranked[k] = values[k] + cfg.boundary_penalty * dist2;
    }
    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (ranked[a] != ranked[b]) return ranked[a] < ranked[b];
      return a < b;
    });

    // Best tracking uses the repaired (feasible) points and raw values.
    for (int k = 0; k < lambda; ++k) {
      if (values[k] < best_f) {
        best_f = values[k];
        best_x.assign(repaired[k].data(), repaired[k].data() + n);
        last_improvement_gen = gen;
      }
    }

    const Eigen::VectorXd old_mean = mean;
    Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) new_mean += weights[i] * sampled[order[i]];
    mean = new_mean;

    const Eigen::VectorXd mean_shift = (mean - old_mean) / sigma;
    const Eigen::VectorXd inv_scale = eigen_scale.cwiseInverse();
    const Eigen::VectorXd whitened =
        eigen_basis * (inv_scale.asDiagonal() * (eigen_basis.transpose() * mean_shift));

    path_sigma = (1.0 - c_sigma) * path_sigma +
                 std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened;
    const double denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (gen + 1)));
    const bool h_sigma = path_sigma.norm() / denom < (1.4 + 2.0 / (n + 1.0)) * chi_n;

    path_cov = (1.0 - c_c) * path_cov;
    if (h_sigma) {
      path_cov += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * mean_shift;
    }

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd y = (sampled[order[i]] - old_mean) / sigma;
      rank_mu += weights[i] * (y * y.transpose());
    }
    const double h_correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    cov = (1.0 - c1 - c_mu) * cov +
          c1 * (path_cov * path_cov.transpose() + h_correction * cov) + c_mu * rank_mu;

    sigma *= std::exp(c_sigma / d_sigma * (path_sigma.norm() / chi_n - 1.0));
    ++gen;
  }

  bool target_reached() const {
    return cfg.target_f && best_f <= *cfg.target_f && !best_x.empty();
  }

  bool should_stop() const {
    if (target_reached()) return true;
    const long stall_limit = static_cast<long>(cfg.stagnation_generations_per_dim) * n;
    return gen - last_improvement_gen >= stall_limit && gen > 0;
  }
};

Cmaes::Cmaes(const CmaConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
Cmaes::~Cmaes() = default;
Cmaes::Cmaes(Cmaes&&) noexcept = default;
Cmaes& Cmaes::operator=(Cmaes&&) noexcept = default;

std::vector<std::vector<double>> Cmaes::ask() { return impl_->ask(); }
void Cmaes::tell(const std::vector<double>& values) { impl_->tell(values); }
int Cmaes::population() const { return impl_->lambda; }
long Cmaes::generation() const { return impl_->gen; }
long Cmaes::evals_used() const { return impl_->evals; }
const std::vector<double>& Cmaes::best_x() const { return impl_->best_x; }
double Cmaes::best_f() const { return impl_->best_f; }
bool Cmaes::has_best() const { return !impl_->best_x.empty(); }
bool Cmaes::should_stop() const { return impl_->should_stop(); }
bool Cmaes::target_reached() const { return impl_->target_reached(); }

OptResult minimize(const std::function<double(const std::vector<double>&)>& objective,
                   const CmaConfig& cfg) {
  OptResult result;
  result.f_best = std::numeric_limits<double>::infinity();
  long evals_left = cfg.max_evals;
  bool target_hit = false;
  bool any_stagnation = false;

  for (int run = 0; run <= cfg.restarts && evals_left > 0 && !target_hit; ++run) {
    CmaConfig run_cfg = cfg;
    run_cfg.seed = (run == 0) ? cfg.seed : mix_seed(cfg.seed, static_cast<std::uint64_t>(run));
    Cmaes state(run_cfg);
    if (evals_left < state.population()) break;

    while (evals_left >= state.population() && !state.should_stop()) {
      auto candidates = state.ask();
      std::vector<double> values(candidates.size());
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        values[k] = objective(candidates[k]);
      }
      state.tell(values);
      evals_left -= state.population();

      if (state.best_f() < result.f_best) {
        result.f_best = state.best_f();
        result.x_best = state.best_x();
      }
      result.history.push_back(result.f_best);
      if (state.target_reached()) break;
    }
    if (state.target_reached()) target_hit = true;
    if (state.should_stop() && !state.target_reached()) any_stagnation = true;
  }

  result.evals_used = cfg.max_evals - evals_left;
  result.converged = target_hit || any_stagnation;
  return result;
}

}  // namespace climbtp
