#pragma once

#include "opd/problem.hpp"
#include "opd/types.hpp"

#include <cstddef>
#include <filesystem>
#include <string>

namespace opd {

struct KktResiduals {
  /// [-E[R_j - b_j]]_+ per constraint.
  Vector feasibility;
  /// |lambda_j E[R_j - b_j]| per constraint.
  Vector slackness;
  /// ||lambda - P_+(lambda - grad d(lambda))||_2.
  double dual_gradient_norm = 0.0;

  double max() const;
};

struct SaddleSolution {
  TabularPolicy policy_star;
  DualVector lambda_star;
  KktResiduals kkt;
  double dual_value = 0.0;
  std::size_t iterations = 0;
  /// Set when some constraint value is flat in its multiplier at the
  /// solution, so an interval of minimizers may exist.
  bool degenerate = false;
};

KktResiduals kkt_residuals(const ProblemSpec& spec, const TabularPolicy& policy,
                           const DualVector& lambda);

/// Minimizes the dual over [0, lambda_max]^|H| until every KKT residual is at
/// most `tol`. Throws InfeasibleInstance or NoConvergence.
SaddleSolution solve_saddle(const ProblemSpec& spec, double tol = 1e-10);

/// E_x KL(pi* || policy) + ||lambda* - lambda||_2^2.
double distance(const ProblemSpec& spec, const SaddleSolution& solution,
                const TabularPolicy& policy, const DualVector& lambda);

std::string to_json(const SaddleSolution& solution);
SaddleSolution solution_from_json(const std::string& text);
void save_solution(const SaddleSolution& solution, const std::filesystem::path& path);
SaddleSolution load_solution(const std::filesystem::path& path);

}  // namespace opd
