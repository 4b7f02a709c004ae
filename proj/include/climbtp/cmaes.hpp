#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace climbtp {

/// Configuration of the evolution strategy. The search space is always the
/// unit box [0,1]^n; callers own any affine mapping to physical units.
struct CmaConfig {
  int dimension = 0;
  int population = 0;  // 0 selects the default 4 + floor(3 ln n)
  double sigma0 = 0.3;
  long max_evals = 10000;
  std::optional<double> target_f;
  std::uint64_t seed = 1;
  int restarts = 0;
  std::vector<double> initial_mean;  // empty selects the box center
  double boundary_penalty = 1e6;     // weight of the quadratic repair penalty
  int stagnation_generations_per_dim = 30;
};

struct OptResult {
  std::vector<double> x_best;  // inside the unit box
  double f_best = 0;
  long evals_used = 0;
  bool converged = false;
  std::vector<double> history;  // best-so-far value after each generation
};

/// Single-run (mu/mu_w, lambda) CMA-ES state driven through ask/tell.
///
/// ask() returns one generation of candidates, already repaired onto the
/// unit box by coordinate-wise clamping; the caller evaluates the objective
/// at exactly these points (concurrently if desired) and hands the values
/// back in order. tell() adds the quadratic distance penalty of each repair
/// to its value for ranking, then advances the distribution one generation:
/// weighted recombination of the top half, the two evolution paths, the
/// cumulative step-size rule against the expected length of an isotropic
/// Gaussian step, and the rank-one plus rank-mu covariance update with the
/// standard dimension-dependent learning rates.
///
/// The first ask() of a run injects the initial mean as candidate 0, so the
/// incumbent is always evaluated and can never be lost.
class Cmaes {
 public:
  explicit Cmaes(const CmaConfig& cfg);
  ~Cmaes();
  Cmaes(Cmaes&&) noexcept;
  Cmaes& operator=(Cmaes&&) noexcept;

  /// Candidates of the next generation; throws std::logic_error when a
  /// previous generation has not been told yet.
  std::vector<std::vector<double>> ask();

  /// Objective values in candidate order. Throws std::logic_error on
  /// protocol or length violations, OptimizationError on non-finite values.
  void tell(const std::vector<double>& values);

  int population() const;
  long generation() const;
  long evals_used() const;
  const std::vector<double>& best_x() const;
  double best_f() const;
  bool has_best() const;

  /// True once the target value is reached or the best value has stalled
  /// for stagnation_generations_per_dim * dimension generations.
  bool should_stop() const;
  bool target_reached() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Full minimization loop: ask/tell with sequential evaluation, optional
/// plain restarts on fresh derived seeds (global best kept), stopping on
/// max_evals, target_f, or stagnation. Deterministic for a fixed config.
OptResult minimize(const std::function<double(const std::vector<double>&)>& objective,
                   const CmaConfig& cfg);

}  // namespace climbtp
