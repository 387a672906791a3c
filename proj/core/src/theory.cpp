#include "opd/theory.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"

#include <algorithm>
#include <cmath>

namespace opd {

namespace {

double scale_of(double num_constraints, double r_max) { return std::sqrt(num_constraints) * r_max; }

}  // namespace

double rho(double num_constraints, double r_max, double beta) {
  const double s = scale_of(num_constraints, r_max);
  return std::max({3.0 * s / (3.0 * s + beta), s / (2.0 * s + beta), 50.0 / 63.0});
}

double rho(const ProblemSpec& spec) {
  return rho(static_cast<double>(spec.num_constraints()), spec.r_max, spec.beta);
}

ContractionConstants contraction_constants(const ProblemSpec& spec) {
  ContractionConstants k;
  k.scale = scale_of(static_cast<double>(spec.num_constraints()), spec.r_max);
  k.c = k.c1 = k.c2 = k.scale;
  k.beta = spec.beta;
  k.eta_theta = 3.0 * k.scale;
  k.eta_lambda = 3.0 * k.scale;
  k.rho = rho(spec);
  k.theorem_denominator =
      std::min(k.eta_theta + k.beta, 1.75 * k.eta_lambda - 0.75 * k.scale);
  k.appendix_denominator =
      k.rho * std::min(k.eta_theta + k.beta,
                       k.eta_lambda + (k.eta_lambda - k.scale) * (1.0 - k.delta));
  return k;
}

PotentialTerms potential_terms(const ProblemSpec& spec, const OPDState& state,
                               const SaddleSolution& solution) {
  const double s = scale_of(static_cast<double>(spec.num_constraints()), spec.r_max);
  const double b = spec.beta;
  PotentialTerms t;
  t.primal = (3.0 * s + b) * expected_kl(spec.prompt_dist, solution.policy_star, state.hat_policy);
  t.primal_lag =
      (2.0 * s + b) * expected_kl(spec.prompt_dist, state.hat_policy, state.pred_policy_prev);
  t.dual = 3.5 * s * (solution.lambda_star.lambdas - state.hat_lambda.lambdas).squaredNorm();
  t.dual_lag =
      (11.0 / 6.0) * s * (state.hat_lambda.lambdas - state.pred_lambda_prev.lambdas).squaredNorm();
  return t;
}

double phi(const ProblemSpec& spec, const OPDState& state, const SaddleSolution& solution) {
  return potential_terms(spec, state, solution).total();
}

double lambda_max(double r_max, double beta, double p_min, double xi) {
  if (!(xi > 0.0))
    throw InfeasibleInstance("Slater margin is " + std::to_string(xi) +
                             "; a positive margin is required to bound the multipliers");
  return (2.0 / xi) * (r_max + beta * std::log(1.0 / p_min));
}

double lambda_max(const ProblemSpec& spec) {
  return lambda_max(spec.r_max, spec.beta, spec.p_min(), slater_margin(spec).xi);
}

double gap_bound(double epsilon_approx, double p_min, double g_max, double eta, double beta,
                 double lipschitz_c) {
  const double ce = lipschitz_c * epsilon_approx;
  return (g_max + (eta + beta) * std::log(1.0 / p_min)) * std::sqrt(2.0 * ce / p_min) +
         (eta + beta) * (1.0 + 1.0 / p_min) * ce / p_min;
}

double score_bound(const ProblemSpec& spec) { return spec.r_max * (1.0 + lambda_max(spec)); }

CertificateReport certify(std::span<const double> phi, double rho, double gap, double tolerance) {
  CertificateReport rep;
  for (std::size_t t = 0; t + 1 < phi.size(); ++t) {
    const double excess = phi[t + 1] - rho * phi[t] - 2.0 * gap;
    if (excess > rep.max_violation) rep.max_violation = excess;
    if (excess > tolerance && !rep.first_violation) rep.first_violation = t + 1;
    if (phi[t] > 0.0) rep.max_ratio = std::max(rep.max_ratio, phi[t + 1] / phi[t]);
  }
  rep.violated = rep.max_violation > tolerance;
  return rep;
}

double theorem_bound(const ContractionConstants& k, double phi1, std::size_t t) {
  const double exponent = t == 0 ? -1.0 : static_cast<double>(t - 1);
  return std::pow(k.rho, exponent) * phi1 / k.theorem_denominator;
}

double appendix_bound(const ContractionConstants& k, double phi1, std::size_t t) {
  return std::pow(k.rho, static_cast<double>(t)) * phi1 / k.appendix_denominator;
}

}  // namespace opd
