#include "opd/opd_dist.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace opd {

void OPDConfig::check() const {
  if (!(eta_theta > 0.0) || !std::isfinite(eta_theta))
    throw std::invalid_argument("eta_theta must be positive");
  if (!(eta_lambda > 0.0) || !std::isfinite(eta_lambda))
    throw std::invalid_argument("eta_lambda must be positive");
  if (!(dual_step_scale > 0.0)) throw std::invalid_argument("dual_step_scale must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  if (lambda_cap && !(*lambda_cap > 0.0)) throw std::invalid_argument("lambda_cap must be positive");
}

OPDConfig recommended_stepsizes(const ProblemSpec& spec) {
  OPDConfig c;
  const double s = std::sqrt(static_cast<double>(spec.num_constraints())) * spec.r_max;
  c.eta_theta = 3.0 * s;
  c.eta_lambda = 3.0 * s;
  c.dual_step_scale = 0.5;
  if (spec.num_constraints() == 0) {
    c.eta_theta = c.eta_lambda = 3.0 * spec.r_max;
    return c;
  }
  try {
    c.lambda_cap = lambda_max(spec);
  } catch (const InfeasibleInstance&) {
    c.lambda_cap.reset();
  }
  return c;
}

DualVector projected_dual_step(const DualVector& base, const Vector& gradient, double step,
                               std::optional<double> cap) {
  if (gradient.size() != base.size())
    throw DimensionMismatch("projected_dual_step: gradient has the wrong length");
  Vector next = (base.lambdas - step * gradient).cwiseMax(0.0);
  if (cap) next = next.cwiseMin(*cap);
  return DualVector(std::move(next));
}

OPDState initial_state(const ProblemSpec& spec) {
  OPDState s;
  s.hat_policy = spec.ref_policy;
  s.hat_lambda = DualVector::zeros(spec.num_constraints());
  s.pred_policy_prev = s.hat_policy;
  s.pred_lambda_prev = s.hat_lambda;
  s.iter = 0;
  return s;
}

OPDState opd_step(const ProblemSpec& spec, const OPDState& state, const OPDConfig& config) {
  const double step = config.dual_step();
  TabularPolicy pi_t =
      proximal_argmax(spec, state.pred_lambda_prev, state.hat_policy, config.eta_theta);
  DualVector lambda_t = projected_dual_step(
      state.hat_lambda, constraint_values(spec, state.pred_policy_prev), step, config.lambda_cap);

  OPDState next;
  next.hat_policy = proximal_argmax(spec, lambda_t, state.hat_policy, config.eta_theta);
  next.hat_lambda = projected_dual_step(state.hat_lambda, constraint_values(spec, pi_t), step,
                                        config.lambda_cap);
  next.pred_policy_prev = std::move(pi_t);
  next.pred_lambda_prev = std::move(lambda_t);
  next.iter = state.iter + 1;
  return next;
}

TraceRecord make_record(const ProblemSpec& spec, const OPDState& state,
                        const SaddleSolution* oracle) {
  TraceRecord r;
  r.iter = state.iter;
  const LagrangianReport rep = lagrangian_report(spec, state.hat_policy, state.hat_lambda);
  r.lagrangian = rep.value;
  r.constraint_values = rep.constraint_values;
  r.lambda = state.hat_lambda;
  r.policy = state.hat_policy;
  if (oracle) {
    r.distance = distance(spec, *oracle, state.hat_policy, state.hat_lambda);
    r.phi = phi(spec, state, *oracle);
  }
  return r;
}

namespace {

bool at_recommended(const ProblemSpec& spec, const OPDConfig& config) {
  const double eta = 3.0 * std::sqrt(static_cast<double>(spec.num_constraints())) * spec.r_max;
  auto close = [&](double v) { return std::abs(v - eta) <= 1e-12 * std::max(1.0, eta); };
  return spec.num_constraints() > 0 && close(config.eta_theta) && close(config.eta_lambda);
}

}  // namespace

ConvergenceTrace opd_run(const ProblemSpec& spec, const OPDConfig& config,
                         const SaddleSolution* oracle) {
  config.check();
  ConvergenceTrace trace;
  trace.method = "opd";
  OPDState state = initial_state(spec);
  trace.initial = make_record(spec, state, oracle);
  trace.records.reserve(config.max_iters);
  for (std::size_t t = 0; t < config.max_iters; ++t) {
    state = opd_step(spec, state, config);
    TraceRecord r = make_record(spec, state, oracle);
    r.inner_steps = 2;
    trace.records.push_back(std::move(r));
  }
  if (oracle && at_recommended(spec, config)) {
    const ContractionConstants k = contraction_constants(spec);
    const double phi1 = *trace.records.front().phi;
    if (k.theorem_denominator > 0.0)
      for (auto& r : trace.records) r.bound = theorem_bound(k, phi1, r.iter);
  }
  return trace;
}

}  // namespace opd
