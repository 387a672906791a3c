#include "opd/baselines.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/opd_dist.hpp"
#include "opd/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace opd {

void BaselineConfig::check() const {
  if (!(eta_theta > 0.0)) throw std::invalid_argument("eta_theta must be positive");
  if (!(eta_lambda > 0.0)) throw std::invalid_argument("eta_lambda must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (lambda_cap && !(*lambda_cap > 0.0)) throw std::invalid_argument("lambda_cap must be positive");
  if (const auto* f = std::get_if<FiniteStep>(&oracle_kind); f && f->k < 1)
    throw std::invalid_argument("finite-step oracle needs k >= 1");
  if (const auto* m = std::get_if<MultiShot>(&oracle_kind); m && !(m->inner_tol > 0.0))
    throw std::invalid_argument("multi-shot inner_tol must be positive");
}

namespace {

TraceRecord record(const ProblemSpec& spec, std::size_t iter, const TabularPolicy& policy,
                   const DualVector& lambda, const SaddleSolution* oracle) {
  TraceRecord r;
  r.iter = iter;
  const LagrangianReport rep = lagrangian_report(spec, policy, lambda);
  r.lagrangian = rep.value;
  r.constraint_values = rep.constraint_values;
  r.lambda = lambda;
  r.policy = policy;
  if (oracle) r.distance = distance(spec, *oracle, policy, lambda);
  return r;
}

// Shared outer loop: `primal` advances the policy at fixed lambda and returns
// the number of inner steps it took.
template <typename Primal>
ConvergenceTrace primal_dual_loop(const ProblemSpec& spec, const BaselineConfig& config,
                                  DualGradientPoint point, const SaddleSolution* oracle,
                                  Primal&& primal) {
  ConvergenceTrace trace;
  TabularPolicy policy = spec.ref_policy;
  DualVector lambda = DualVector::zeros(spec.num_constraints());
  trace.initial = record(spec, 0, policy, lambda, oracle);
  if (oracle) trace.initial.phi = phi(spec, OPDState{policy, lambda, policy, lambda, 0}, *oracle);
  trace.records.reserve(config.max_iters);
  const double step = 1.0 / config.eta_lambda;
  std::optional<Vector> prev_grad;
  for (std::size_t t = 1; t <= config.max_iters; ++t) {
    const TabularPolicy prev_policy = policy;
    const DualVector prev_lambda = lambda;
    const Vector g_before = constraint_values(spec, policy);
    const std::size_t inner = primal(policy, lambda);
    Vector g = point == DualGradientPoint::before_primal ? g_before : constraint_values(spec, policy);
    Vector used = g;
    if (config.dual_rule == DualRule::optimistic) used = 2.0 * g - prev_grad.value_or(g);
    prev_grad = g;
    lambda = projected_dual_step(lambda, used, step, config.lambda_cap);
    TraceRecord r = record(spec, t, policy, lambda, oracle);
    r.inner_steps = inner;
    // Potential with the previous iterate standing in for the optimistic lag.
    if (oracle) r.phi = phi(spec, OPDState{policy, lambda, prev_policy, prev_lambda, t}, *oracle);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

}  // namespace

ConvergenceTrace pd_run(const ProblemSpec& spec, const BaselineConfig& config,
                        const SaddleSolution* oracle) {
  config.check();
  const auto* f = std::get_if<FiniteStep>(&config.oracle_kind);
  if (!f) throw std::invalid_argument("pd_run needs a finite-step primal oracle");
  const int k = f->k;
  auto trace = primal_dual_loop(
      spec, config, config.gradient_point.value_or(DualGradientPoint::before_primal), oracle,
      [&](TabularPolicy& policy, const DualVector& lambda) {
        for (int i = 0; i < k; ++i) policy = proximal_argmax(spec, lambda, policy, config.eta_theta);
        return static_cast<std::size_t>(k);
      });
  trace.method = "pd";
  return trace;
}

ConvergenceTrace multi_shot_run(const ProblemSpec& spec, const BaselineConfig& config,
                                const SaddleSolution* oracle) {
  config.check();
  const auto* m = std::get_if<MultiShot>(&config.oracle_kind);
  if (!m) throw std::invalid_argument("multi_shot_run needs a multi-shot primal oracle");
  const double tol = m->inner_tol;
  auto trace = primal_dual_loop(
      spec, config, config.gradient_point.value_or(DualGradientPoint::after_primal), oracle,
      [&](TabularPolicy& policy, const DualVector& lambda) {
        double value = lagrangian_report(spec, policy, lambda).value;
        for (std::size_t steps = 1; steps <= kInnerStepBudget; ++steps) {
          policy = proximal_argmax(spec, lambda, policy, config.eta_theta);
          const double next = lagrangian_report(spec, policy, lambda).value;
          const double improvement = next - value;
          value = next;
          if (improvement < tol) return steps;
        }
        throw InnerLoopBudgetExceeded("multi-shot inner loop exceeded " +
                                      std::to_string(kInnerStepBudget) + " steps");
      });
  trace.method = "multi_shot";
  return trace;
}

OneShotResult one_shot_run(const ProblemSpec& spec, std::size_t dual_steps, double dual_step,
                           const SaddleSolution* oracle, std::optional<DualVector> initial,
                           std::optional<double> lambda_cap) {
  if (dual_steps == 0) throw std::invalid_argument("one_shot_run needs at least one dual step");
  if (!(dual_step > 0.0)) throw std::invalid_argument("one_shot_run: dual_step must be positive");
  DualVector lambda = initial.value_or(DualVector::zeros(spec.num_constraints()));
  if (lambda.size() != spec.num_constraints())
    throw DimensionMismatch("one_shot_run: initial dual vector has the wrong length");

  auto make = [&](std::size_t iter, const DualVector& l, const DualValue& d) {
    TraceRecord r;
    r.iter = iter;
    r.policy = optimal_policy(spec, l);
    r.lambda = l;
    r.lagrangian = d.value;
    r.constraint_values = d.gradient;
    if (oracle) r.distance = distance(spec, *oracle, r.policy, l);
    return r;
  };

  OneShotResult res;
  res.trace.method = "one_shot";
  DualValue d = dual_function(spec, lambda);
  res.trace.initial = make(0, lambda, d);
  res.trace.records.reserve(dual_steps);
  for (std::size_t t = 1; t <= dual_steps; ++t) {
    lambda = projected_dual_step(lambda, d.gradient, dual_step, lambda_cap);
    d = dual_function(spec, lambda);
    res.trace.records.push_back(make(t, lambda, d));
  }
  res.lambda = lambda;
  res.policy = res.trace.records.back().policy;
  return res;
}

std::vector<double> bilinear_run(const BilinearProblem& problem, BilinearMethod method,
                                 std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("bilinear_run needs at least one step");
  const Eigen::MatrixXd& a = problem.a;
  if (problem.x0.size() != a.rows() || problem.y0.size() != a.cols())
    throw DimensionMismatch("bilinear_run: initial point does not match A");
  if (!(problem.alpha > 0.0)) throw std::invalid_argument("bilinear_run: alpha must be positive");

  Eigen::VectorXd x = problem.x0;
  Eigen::VectorXd y = problem.y0;
  auto norm = [&] { return std::sqrt(x.squaredNorm() + y.squaredNorm()); };
  std::vector<double> out;
  out.reserve(steps + 1);
  out.push_back(norm());

  Eigen::VectorXd gx_prev = a * y;
  Eigen::VectorXd gy_prev = a.transpose() * x;
  for (std::size_t t = 0; t < steps; ++t) {
    const Eigen::VectorXd gx = a * y;
    const Eigen::VectorXd gy = a.transpose() * x;
    if (method == BilinearMethod::pd) {
      x += problem.alpha * gx;
      y -= problem.alpha * gy;
    } else {
      x += problem.alpha * (2.0 * gx - gx_prev);
      y -= problem.alpha * (2.0 * gy - gy_prev);
    }
    gx_prev = gx;
    gy_prev = gy;
    out.push_back(norm());
  }
  return out;
}

}  // namespace opd
