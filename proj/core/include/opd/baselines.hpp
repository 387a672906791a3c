#pragma once

#include "opd/oracle.hpp"
#include "opd/problem.hpp"
#include "opd/trace.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace opd {

/// k mirror-ascent steps per dual update.
struct FiniteStep {
  int k = 1;
};
/// Closed-form primal maximizer, no inner iterations.
struct OneShot {};
/// Mirror ascent until the per-step Lagrangian improvement drops below inner_tol.
struct MultiShot {
  double inner_tol = 1e-10;
};

using PrimalOracleKind = std::variant<FiniteStep, OneShot, MultiShot>;

/// Which policy the dual gradient is evaluated at in an outer iteration.
enum class DualGradientPoint {
  /// The policy entering the iteration (simultaneous descent-ascent).
  before_primal,
  /// The policy returned by the primal oracle (alternating updates).
  after_primal,
};

enum class DualRule {
  projected,
  /// Gradient replaced by 2 g_t - g_{t-1}, with g_{-1} = g_0.
  optimistic,
};

struct BaselineConfig {
  PrimalOracleKind oracle_kind = FiniteStep{};
  double eta_theta = 1.0;
  /// Dual step is 1 / eta_lambda.
  double eta_lambda = 1.0;
  std::size_t max_iters = 300;
  /// Unset: before_primal for finite-step PD, after_primal for multi-shot.
  std::optional<DualGradientPoint> gradient_point;
  DualRule dual_rule = DualRule::projected;
  std::optional<double> lambda_cap;

  void check() const;
};

inline constexpr std::size_t kInnerStepBudget = 100000;

ConvergenceTrace pd_run(const ProblemSpec& spec, const BaselineConfig& config,
                        const SaddleSolution* oracle = nullptr);

struct OneShotResult {
  DualVector lambda;
  TabularPolicy policy;
  /// `lagrangian` holds d(lambda_t) for each step.
  ConvergenceTrace trace;
};

/// Projected gradient descent on the dual function.
OneShotResult one_shot_run(const ProblemSpec& spec, std::size_t dual_steps, double dual_step,
                           const SaddleSolution* oracle = nullptr,
                           std::optional<DualVector> initial = std::nullopt,
                           std::optional<double> lambda_cap = std::nullopt);

ConvergenceTrace multi_shot_run(const ProblemSpec& spec, const BaselineConfig& config,
                                const SaddleSolution* oracle = nullptr);

struct BilinearProblem {
  Eigen::MatrixXd a;
  double alpha = 0.1;
  Eigen::VectorXd x0;
  Eigen::VectorXd y0;
};

enum class BilinearMethod { pd, optimistic };

/// ||z_t|| for t = 0..T of the simultaneous iteration on min_y max_x x^T A y.
std::vector<double> bilinear_run(const BilinearProblem& problem, BilinearMethod method,
                                 std::size_t steps);

}  // namespace opd
