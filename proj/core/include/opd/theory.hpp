#pragma once

#include "opd/oracle.hpp"
#include "opd/problem.hpp"
#include "opd/trace.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace opd {

/// Closed-form constants of the last-iterate analysis at the recommended
/// step sizes eta_theta = eta_lambda = 3 sqrt(|H|) R_max and delta = theta = 3/4.
struct ContractionConstants {
  /// sqrt(|H|) R_max; equals C = C1 = C2.
  double scale = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double delta = 0.75;
  double theta_prime = 0.75;
  double beta = 0.0;
  double eta_theta = 0.0;
  double eta_lambda = 0.0;
  double rho = 0.0;
  /// min(eta_theta + beta, 7/4 eta_lambda - 3/4 sqrt(|H|) R_max).
  double theorem_denominator = 0.0;
  /// rho * min(eta_theta + beta, eta_lambda + (eta_lambda - sqrt(|H|) R_max)(1 - delta)).
  double appendix_denominator = 0.0;
};

ContractionConstants contraction_constants(const ProblemSpec& spec);

double rho(const ProblemSpec& spec);
double rho(double num_constraints, double r_max, double beta);

struct PotentialTerms {
  double primal = 0.0;      // (3s + beta) E KL(pi* || hat_pi_t)
  double primal_lag = 0.0;  // (2s + beta) E KL(hat_pi_t || pi_{t-1})
  double dual = 0.0;        // 7/2 s ||lambda* - hat_lambda_t||^2
  double dual_lag = 0.0;    // 11/6 s ||hat_lambda_t - lambda_{t-1}||^2

  double total() const { return primal + primal_lag + dual + dual_lag; }
};

PotentialTerms potential_terms(const ProblemSpec& spec, const OPDState& state,
                               const SaddleSolution& solution);
double phi(const ProblemSpec& spec, const OPDState& state, const SaddleSolution& solution);

/// (2 / xi)(R_max + beta ln(1 / p_min)); throws InfeasibleInstance if xi <= 0.
double lambda_max(const ProblemSpec& spec);
double lambda_max(double r_max, double beta, double p_min, double xi);

/// Error floor induced by inexact primal updates:
///   (g_max + (eta+beta) ln(1/p_min)) sqrt(2 C eps / p_min)
///     + (eta+beta)(1 + 1/p_min) C eps / p_min.
double gap_bound(double epsilon_approx, double p_min, double g_max, double eta, double beta,
                 double lipschitz_c);

/// Bound on |S_lambda| over the multiplier box: R_max (1 + lambda_max).
double score_bound(const ProblemSpec& spec);

struct CertificateReport {
  /// max_t [Phi_{t+1} - rho Phi_t - 2 gap]_+.
  double max_violation = 0.0;
  std::optional<std::size_t> first_violation;
  /// max_t Phi_{t+1} / Phi_t over steps with Phi_t > 0.
  double max_ratio = 0.0;
  bool violated = false;
};

inline constexpr double kCertificateTolerance = 1e-9;

CertificateReport certify(std::span<const double> phi, double rho, double gap = 0.0,
                          double tolerance = kCertificateTolerance);

/// rho^{t-1} Phi_1 / theorem_denominator.
double theorem_bound(const ContractionConstants& k, double phi1, std::size_t t);
/// rho^t Phi_1 / appendix_denominator.
double appendix_bound(const ContractionConstants& k, double phi1, std::size_t t);

}  // namespace opd
