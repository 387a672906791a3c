#include "opd/opd_npg.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/rng.hpp"
#include "opd/theory.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace opd {

namespace {

void check_theta(const ProblemSpec& spec, const SoftmaxParams& theta) {
  if (theta.logits.rows() != spec.num_prompts || theta.logits.cols() != spec.num_responses)
    throw DimensionMismatch("softmax logits have the wrong shape");
  if (!theta.logits.allFinite()) throw std::invalid_argument("softmax logits must be finite");
}

// ln pi(y|x) straight from the logits, avoiding log(0) on tiny probabilities.
Table log_policy(const Table& logits) {
  Table out(logits.rows(), logits.cols());
  for (Eigen::Index x = 0; x < logits.rows(); ++x) {
    const double m = logits.row(x).maxCoeff();
    const double lse = m + std::log((logits.row(x).array() - m).exp().sum());
    out.row(x) = logits.row(x).array() - lse;
  }
  return out;
}

Table advantage_from_logs(const ProblemSpec& spec, const TabularPolicy& policy,
                          const Table& log_pi, const DualVector& lambda) {
  const Table s = aggregated_reward(spec, lambda).values;
  const Table log_ref = spec.ref_policy.probs.array().log();
  Table a = s - spec.beta * (log_pi - log_ref);
  for (Eigen::Index x = 0; x < a.rows(); ++x) {
    const double v = a.row(x).dot(policy.probs.row(x));
    a.row(x).array() -= v;
  }
  return a;
}

// Least-norm solution of (diag(pi) - pi pi^T) w = pi .* A for one prompt. The
// prompt weight D(x) multiplies both sides and cancels.
Eigen::VectorXd fisher_solve(const Eigen::VectorXd& p, const Eigen::VectorXd& rhs, Eigen::Index x) {
  const Eigen::MatrixXd f = Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = kFisherCutoff * ev.maxCoeff();
  Eigen::Index kept = 0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) {
      inv[i] = 1.0 / ev[i];
      ++kept;
    }
  }
  if (kept < p.size() - 1)
    throw DegenerateFisher("Fisher block for prompt " + std::to_string(x) + " has rank " +
                           std::to_string(kept) + " < " + std::to_string(p.size() - 1) +
                           "; the policy has collapsed");
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * inv.asDiagonal() * (v.transpose() * rhs);
}

}  // namespace

TabularPolicy SoftmaxParams::policy() const {
  TabularPolicy p;
  p.probs = log_policy(logits).array().exp();
  return p;
}

SoftmaxParams SoftmaxParams::from_policy(const TabularPolicy& policy) {
  if (!(policy.probs.minCoeff() > 0.0))
    throw SupportViolation("softmax logits need a policy with full support");
  SoftmaxParams s{policy.probs.array().log()};
  s.center();
  return s;
}

void SoftmaxParams::center() {
  for (Eigen::Index x = 0; x < logits.rows(); ++x) logits.row(x).array() -= logits.row(x).mean();
}

std::vector<Eigen::MatrixXd> fisher(const ProblemSpec& spec, const SoftmaxParams& theta) {
  check_theta(spec, theta);
  const TabularPolicy p = theta.policy();
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(spec.num_prompts));
  for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
    const Eigen::VectorXd px = p.probs.row(x).transpose();
    Eigen::MatrixXd f = spec.prompt_dist[x] * (Eigen::MatrixXd(px.asDiagonal()) - px * px.transpose());
    blocks.push_back(0.5 * (f + f.transpose()));
  }
  return blocks;
}

Table advantage(const ProblemSpec& spec, const TabularPolicy& policy, const DualVector& lambda) {
  if (policy.num_prompts() != spec.num_prompts || policy.num_responses() != spec.num_responses)
    throw DimensionMismatch("advantage: policy has the wrong shape");
  if (!(policy.probs.minCoeff() > 0.0))
    throw SupportViolation("advantage: policy must have full support");
  return advantage_from_logs(spec, policy, policy.probs.array().log(), lambda);
}

Table policy_gradient(const ProblemSpec& spec, const SoftmaxParams& theta,
                      const DualVector& lambda) {
  check_theta(spec, theta);
  const TabularPolicy p = theta.policy();
  const Table a = advantage_from_logs(spec, p, log_policy(theta.logits), lambda);
  Table g = p.probs.cwiseProduct(a);
  for (Eigen::Index x = 0; x < g.rows(); ++x) g.row(x) *= spec.prompt_dist[x];
  return g;
}

SoftmaxParams npg_primal_step(const ProblemSpec& spec, const SoftmaxParams& theta,
                              const DualVector& lambda, double eta_theta, NpgPath path,
                              std::optional<double> clamp_p_floor) {
  check_theta(spec, theta);
  if (!(eta_theta > 0.0)) throw std::invalid_argument("npg_primal_step: eta_theta must be positive");
  const Table log_pi = log_policy(theta.logits);
  // Below the normal range the Fisher block and advantage lose all precision.
  if (log_pi.minCoeff() < std::log(std::numeric_limits<double>::min()))
    throw DegenerateFisher(
        "policy has an entry below the smallest normal double; the softmax has collapsed");
  const TabularPolicy p = theta.policy();
  const Table a = advantage_from_logs(spec, p, log_pi, lambda);

  Table w(spec.num_prompts, spec.num_responses);
  if (path == NpgPath::advantage) {
    w = a;
  } else {
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
      const Eigen::VectorXd px = p.probs.row(x).transpose();
      const Eigen::VectorXd rhs = px.cwiseProduct(a.row(x).transpose());
      w.row(x) = fisher_solve(px, rhs, x).transpose();
    }
  }
  SoftmaxParams next{theta.logits + w / (eta_theta + spec.beta)};
  next.center();
  if (clamp_p_floor) {
    const double bound = std::log(1.0 / *clamp_p_floor);
    next.logits = next.logits.cwiseMax(-bound).cwiseMin(bound);
  }
  return next;
}

NpgConfig default_npg_config(const ProblemSpec& spec) {
  NpgConfig c;
  c.opd = recommended_stepsizes(spec);
  c.opd.dual_step_scale = 1.0;
  return c;
}

NpgResult npg_run(const ProblemSpec& spec, const NpgConfig& config, const SaddleSolution* oracle,
                  std::optional<ApproxNoise> noise) {
  const OPDConfig& oc = config.opd;
  oc.check();
  if (noise && !(noise->epsilon >= 0.0))
    throw std::invalid_argument("npg_run: noise epsilon must be nonnegative");

  NpgResult res;
  res.trace.method = "opd_npg";
  std::optional<Rng> rng;
  if (noise) rng.emplace(noise->seed);

  auto primal = [&](const SoftmaxParams& theta, const DualVector& lambda) {
    SoftmaxParams out =
        npg_primal_step(spec, theta, lambda, oc.eta_theta, config.path, config.clamp_p_floor);
    if (!noise || noise->epsilon == 0.0) return out;
    Table n(out.logits.rows(), out.logits.cols());
    for (Eigen::Index x = 0; x < n.rows(); ++x)
      for (Eigen::Index y = 0; y < n.cols(); ++y) n(x, y) = rng->uniform(-1.0, 1.0);
    for (Eigen::Index x = 0; x < n.rows(); ++x) n.row(x).array() -= n.row(x).mean();
    const double l1 = n.cwiseAbs().sum();
    if (l1 == 0.0) return out;
    n *= noise->epsilon / l1;
    const Table before = log_policy(out.logits);
    out.logits += n;
    const Table after = log_policy(out.logits);
    const double mean_change = (after - before).cwiseAbs().mean();
    res.lipschitz_proxy = std::max(res.lipschitz_proxy, mean_change / n.cwiseAbs().sum());
    return out;
  };

  SoftmaxParams hat_theta = SoftmaxParams::from_policy(spec.ref_policy);
  OPDState state = initial_state(spec);
  res.trace.initial = make_record(spec, state, oracle);
  res.trace.records.reserve(oc.max_iters);

  const double step = oc.dual_step();
  for (std::size_t t = 0; t < oc.max_iters; ++t) {
    SoftmaxParams theta_t = primal(hat_theta, state.pred_lambda_prev);
    DualVector lambda_t = projected_dual_step(
        state.hat_lambda, constraint_values(spec, state.pred_policy_prev), step, oc.lambda_cap);
    SoftmaxParams next_hat = primal(hat_theta, lambda_t);
    const TabularPolicy pi_t = theta_t.policy();

    OPDState next;
    next.hat_lambda =
        projected_dual_step(state.hat_lambda, constraint_values(spec, pi_t), step, oc.lambda_cap);
    next.hat_policy = next_hat.policy();
    next.pred_policy_prev = pi_t;
    next.pred_lambda_prev = std::move(lambda_t);
    next.iter = state.iter + 1;

    hat_theta = std::move(next_hat);
    state = std::move(next);
    TraceRecord r = make_record(spec, state, oracle);
    r.inner_steps = 2;
    res.trace.records.push_back(std::move(r));
  }

  res.rho = rho(spec);
  if (noise && noise->epsilon > 0.0 && spec.num_constraints() > 0) {
    res.lipschitz_used = config.lipschitz_c.value_or(res.lipschitz_proxy);
    res.g_max = score_bound(spec);
    res.gap = gap_bound(noise->epsilon, spec.p_min(), res.g_max, oc.eta_theta, spec.beta,
                        res.lipschitz_used);
  } else {
    res.lipschitz_used = config.lipschitz_c.value_or(0.0);
  }
  res.neighborhood = 2.0 * res.gap / (1.0 - res.rho);

  if (oracle && spec.num_constraints() > 0) {
    const ContractionConstants k = contraction_constants(spec);
    const double eta = k.eta_theta;
    const bool recommended = std::abs(oc.eta_theta - eta) <= 1e-12 * std::max(1.0, eta) &&
                             std::abs(oc.eta_lambda - eta) <= 1e-12 * std::max(1.0, eta);
    if (recommended && k.theorem_denominator > 0.0) {
      const double phi1 = *res.trace.records.front().phi;
      for (auto& r : res.trace.records) {
        const double decay = 1.0 - std::pow(res.rho, static_cast<double>(r.iter));
        r.bound = theorem_bound(k, phi1, r.iter) + 2.0 * decay / (1.0 - res.rho) * res.gap;
      }
    }
  }
  return res;
}

}  // namespace opd
