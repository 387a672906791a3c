#pragma once

#include "opd/problem.hpp"
#include "opd/types.hpp"

#include <span>

namespace opd {

struct LagrangianReport {
  double value = 0.0;
  /// E[R_j - b_j] per constraint; also the dual gradient.
  Vector constraint_values;
  /// E_x KL(pi(.|x) || pi_ref(.|x)).
  double kl_to_ref = 0.0;
  /// E[sum_k w_k R_k].
  double soft_value = 0.0;
};

/// S_lambda(x, y) = sum_k w_k R_k(x, y) + sum_j lambda_j (R_j(x, y) - b_j).
RewardTable aggregated_reward(const ProblemSpec& spec, const DualVector& lambda);

/// E_{x ~ D, y ~ pi}[R_j - b_j] for each constraint.
Vector constraint_values(const ProblemSpec& spec, const TabularPolicy& policy);

LagrangianReport lagrangian_report(const ProblemSpec& spec, const TabularPolicy& policy,
                                   const DualVector& lambda);

/// sum_i p_i ln(p_i / q_i) with 0 ln 0 = 0. Throws SupportViolation when
/// p_i > 0 and q_i = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// E_{x ~ D} KL(p(.|x) || q(.|x)).
double expected_kl(const Vector& prompt_dist, const TabularPolicy& p, const TabularPolicy& q);

/// argmax_pi E_x[<pi, S> - beta KL(pi || ref) - eta KL(pi || anchor)], row by row:
///   pi(y|x) ~ anchor^{eta/(eta+beta)} ref^{beta/(eta+beta)} exp(S / (eta+beta)).
/// `eta == 0` gives the unregularized closed form and ignores `anchor`.
TabularPolicy proximal_argmax(const ProblemSpec& spec, const DualVector& lambda,
                              const TabularPolicy& anchor, double eta);

/// Same update for an arbitrary score table.
TabularPolicy proximal_argmax_scores(const ProblemSpec& spec, const Table& scores,
                                     const TabularPolicy& anchor, double eta);

/// Closed-form maximizer of L(., lambda).
TabularPolicy optimal_policy(const ProblemSpec& spec, const DualVector& lambda);

struct DualValue {
  double value = 0.0;
  Vector gradient;
};

/// d(lambda) = max_pi L(pi, lambda) = E_x[beta ln Z(x)] and its gradient.
DualValue dual_function(const ProblemSpec& spec, const DualVector& lambda);

struct SlaterResult {
  double xi = 0.0;
  TabularPolicy witness;
};

/// max_pi min_j E[R_j - b_j]. Exact for a single constraint; projected
/// supergradient ascent (best iterate kept) otherwise.
SlaterResult slater_margin(const ProblemSpec& spec);

/// Euclidean projection onto the probability simplex.
void project_to_simplex(std::span<double> v);

}  // namespace opd
