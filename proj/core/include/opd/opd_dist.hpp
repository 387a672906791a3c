#pragma once

#include "opd/oracle.hpp"
#include "opd/problem.hpp"
#include "opd/trace.hpp"

#include <cstddef>
#include <optional>

namespace opd {

struct OPDConfig {
  double eta_theta = 1.0;
  double eta_lambda = 1.0;
  /// 0.5 gives the argmin form lambda - g / (2 eta_lambda); 1.0 the explicit
  /// lambda - g / eta_lambda rule.
  double dual_step_scale = 0.5;
  std::size_t max_iters = 300;
  /// Optional projection ceiling on every multiplier.
  std::optional<double> lambda_cap;

  /// Throws std::invalid_argument on non-positive step parameters.
  void check() const;
  double dual_step() const { return dual_step_scale / eta_lambda; }
};

/// eta_theta = eta_lambda = 3 sqrt(|H|) R_max, scale 0.5, cap = lambda_max
/// (left unset when the instance has no positive Slater margin).
OPDConfig recommended_stepsizes(const ProblemSpec& spec);

/// [base - step * gradient]_+, clipped at `cap` when given.
DualVector projected_dual_step(const DualVector& base, const Vector& gradient, double step,
                               std::optional<double> cap = std::nullopt);

/// hat_pi_0 = pi_ref, hat_lambda_0 = 0, lags equal to the live iterates.
OPDState initial_state(const ProblemSpec& spec);

OPDState opd_step(const ProblemSpec& spec, const OPDState& state, const OPDConfig& config);

/// Runs `config.max_iters` steps from initial_state. Distances, Phi and the
/// theorem-form bound are recorded only when `oracle` is given.
ConvergenceTrace opd_run(const ProblemSpec& spec, const OPDConfig& config,
                         const SaddleSolution* oracle = nullptr);

/// Fills a record with the Lagrangian, constraint values and (with an oracle)
/// distance and potential for the live iterates of `state`.
TraceRecord make_record(const ProblemSpec& spec, const OPDState& state,
                        const SaddleSolution* oracle);

}  // namespace opd
