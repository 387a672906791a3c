#pragma once

#include "opd/opd_dist.hpp"
#include "opd/oracle.hpp"
#include "opd/problem.hpp"
#include "opd/trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace opd {

/// Tabular softmax logits, stored mean-centered per prompt.
struct SoftmaxParams {
  Table logits;

  TabularPolicy policy() const;
  static SoftmaxParams from_policy(const TabularPolicy& policy);
  /// Subtracts each row's mean (the softmax gauge).
  void center();
};

/// Per-prompt D(x) (diag(pi_x) - pi_x pi_x^T).
std::vector<Eigen::MatrixXd> fisher(const ProblemSpec& spec, const SoftmaxParams& theta);

/// A(x, y) = S_lambda(x, y) - beta ln(pi / pi_ref) - V(x), V the pi-average of the first two terms.
Table advantage(const ProblemSpec& spec, const TabularPolicy& policy, const DualVector& lambda);

/// dL/dtheta_{x,y} = D(x) pi(y|x) A(x, y).
Table policy_gradient(const ProblemSpec& spec, const SoftmaxParams& theta,
                      const DualVector& lambda);

enum class NpgPath { pseudoinverse, advantage };

/// Relative eigenvalue cutoff for the Fisher pseudoinverse.
inline constexpr double kFisherCutoff = 1e-12;

/// theta + F^+ grad L / (eta + beta), then projected onto centered logits. When
/// `clamp_p_floor` is set, logits are also clamped to +-ln(1 / p_floor).
/// Throws DegenerateFisher once some probability leaves the normal double range.
SoftmaxParams npg_primal_step(const ProblemSpec& spec, const SoftmaxParams& theta,
                              const DualVector& lambda, double eta_theta, NpgPath path,
                              std::optional<double> clamp_p_floor = std::nullopt);

struct ApproxNoise {
  /// l1 budget of the logit perturbation applied after each primal step.
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct NpgConfig {
  OPDConfig opd;
  NpgPath path = NpgPath::advantage;
  std::optional<double> clamp_p_floor;
  /// Log-policy Lipschitz constant for the gap term; the measured proxy is
  /// used when unset.
  std::optional<double> lipschitz_c;
};

/// Recommended step sizes with the explicit 1 / eta_lambda dual rule.
NpgConfig default_npg_config(const ProblemSpec& spec);

struct NpgResult {
  ConvergenceTrace trace;
  /// max over perturbed steps of E_{x, y~unif}|log pi_noisy - log pi_exact| / ||dtheta||_1.
  double lipschitz_proxy = 0.0;
  double lipschitz_used = 0.0;
  double g_max = 0.0;
  double gap = 0.0;
  double rho = 0.0;
  /// 2 gap / (1 - rho).
  double neighborhood = 0.0;
};

NpgResult npg_run(const ProblemSpec& spec, const NpgConfig& config,
                  const SaddleSolution* oracle = nullptr,
                  std::optional<ApproxNoise> noise = std::nullopt);

}  // namespace opd
