#include "opd/lagrangian.hpp"

#include "opd/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace opd {

namespace {

void check_policy(const ProblemSpec& spec, const TabularPolicy& policy, const char* what) {
  if (policy.num_prompts() != spec.num_prompts || policy.num_responses() != spec.num_responses)
    throw DimensionMismatch(std::string(what) + " is " + std::to_string(policy.num_prompts()) +
                            "x" + std::to_string(policy.num_responses()) + ", expected " +
                            std::to_string(spec.num_prompts) + "x" +
                            std::to_string(spec.num_responses));
}

void check_lambda(const ProblemSpec& spec, const DualVector& lambda) {
  if (lambda.size() != spec.num_constraints())
    throw DimensionMismatch("dual vector has " + std::to_string(lambda.size()) +
                            " entries, expected " + std::to_string(spec.num_constraints()));
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

RewardTable aggregated_reward(const ProblemSpec& spec, const DualVector& lambda) {
  check_lambda(spec, lambda);
  Table s = Table::Zero(spec.num_prompts, spec.num_responses);
  for (const auto& soft : spec.soft_rewards) s += soft.weight * soft.reward.values;
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    s += lambda[j] * spec.hard_rewards[static_cast<std::size_t>(j)].shifted.values;
  return {s};
}

Vector constraint_values(const ProblemSpec& spec, const TabularPolicy& policy) {
  check_policy(spec, policy, "policy");
  Vector out(spec.num_constraints());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const Table& r = spec.hard_rewards[static_cast<std::size_t>(j)].shifted.values;
    out[j] = spec.prompt_dist.dot(policy.probs.cwiseProduct(r).rowwise().sum());
  }
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionMismatch("kl_divergence: length mismatch");
  // Summed as p ln(p/q) - p + q, which is termwise nonnegative and equals the
  // usual form on normalized inputs; keeps near-identical rows from going negative.
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) {
      total += q[i];
      continue;
    }
    if (q[i] <= 0.0)
      throw SupportViolation("kl_divergence: p has mass at index " + std::to_string(i) +
                             " where q is zero");
    total += std::max(0.0, p[i] * std::log(p[i] / q[i]) - p[i] + q[i]);
  }
  return total;
}

double expected_kl(const Vector& prompt_dist, const TabularPolicy& p, const TabularPolicy& q) {
  if (p.num_prompts() != q.num_prompts() || p.num_responses() != q.num_responses() ||
      prompt_dist.size() != p.num_prompts())
    throw DimensionMismatch("expected_kl: shape mismatch");
  double total = 0.0;
  for (Eigen::Index x = 0; x < p.num_prompts(); ++x)
    total += prompt_dist[x] * kl_divergence(p.row(x), q.row(x));
  return total;
}

LagrangianReport lagrangian_report(const ProblemSpec& spec, const TabularPolicy& policy,
                                   const DualVector& lambda) {
  check_policy(spec, policy, "policy");
  check_lambda(spec, lambda);
  LagrangianReport rep;
  for (const auto& soft : spec.soft_rewards)
    rep.soft_value +=
        soft.weight * spec.prompt_dist.dot(policy.probs.cwiseProduct(soft.reward.values).rowwise().sum());
  rep.constraint_values = constraint_values(spec, policy);
  rep.kl_to_ref = expected_kl(spec.prompt_dist, policy, spec.ref_policy);
  rep.value = rep.soft_value + lambda.lambdas.dot(rep.constraint_values) - spec.beta * rep.kl_to_ref;
  return rep;
}

TabularPolicy proximal_argmax_scores(const ProblemSpec& spec, const Table& scores,
                                     const TabularPolicy& anchor, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("proximal_argmax: eta must be >= 0");
  if (scores.rows() != spec.num_prompts || scores.cols() != spec.num_responses)
    throw DimensionMismatch("proximal_argmax: score table has the wrong shape");
  const bool use_anchor = eta > 0.0;
  if (use_anchor) check_policy(spec, anchor, "anchor");

  const double denom = eta + spec.beta;
  const Table& ref = spec.ref_policy.probs;
  Table logits(spec.num_prompts, spec.num_responses);
  for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
    for (Eigen::Index y = 0; y < spec.num_responses; ++y) {
      double num = spec.beta * std::log(ref(x, y)) + scores(x, y);
      if (use_anchor) {
        const double a = anchor.probs(x, y);
        if (!(a > 0.0))
          throw SupportViolation("proximal_argmax: anchor is zero at (" + std::to_string(x) +
                                 ", " + std::to_string(y) + ") where the reference is positive");
        num += eta * std::log(a);
      }
      logits(x, y) = num / denom;
    }
  }
  TabularPolicy out;
  out.probs = Table(spec.num_prompts, spec.num_responses);
  for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
    const double m = logits.row(x).maxCoeff();
    out.probs.row(x) = (logits.row(x).array() - m).exp();
    out.probs.row(x) /= out.probs.row(x).sum();
  }
  return out;
}

TabularPolicy proximal_argmax(const ProblemSpec& spec, const DualVector& lambda,
                              const TabularPolicy& anchor, double eta) {
  return proximal_argmax_scores(spec, aggregated_reward(spec, lambda).values, anchor, eta);
}

TabularPolicy optimal_policy(const ProblemSpec& spec, const DualVector& lambda) {
  return proximal_argmax(spec, lambda, spec.ref_policy, 0.0);
}

DualValue dual_function(const ProblemSpec& spec, const DualVector& lambda) {
  const Table s = aggregated_reward(spec, lambda).values;
  const Table log_ref = spec.ref_policy.probs.array().log();
  double value = 0.0;
  for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
    const Eigen::RowVectorXd row = log_ref.row(x) + s.row(x) / spec.beta;
    value += spec.prompt_dist[x] * spec.beta * log_sum_exp(row);
  }
  return {value, constraint_values(spec, optimal_policy(spec, lambda))};
}

void project_to_simplex(std::span<double> v) {
  if (v.empty()) return;
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) tau = candidate;
  }
  for (auto& e : v) e = std::max(e - tau, 0.0);
}

SlaterResult slater_margin(const ProblemSpec& spec) {
  const Eigen::Index nx = spec.num_prompts;
  const Eigen::Index ny = spec.num_responses;
  const auto nh = static_cast<std::size_t>(spec.num_constraints());
  SlaterResult res;
  if (nh == 0) {
    res.xi = std::numeric_limits<double>::infinity();
    res.witness = spec.ref_policy;
    return res;
  }

  auto deterministic = [&](const Table& r) {
    TabularPolicy p;
    p.probs = Table::Zero(nx, ny);
    for (Eigen::Index x = 0; x < nx; ++x) {
      Eigen::Index best = 0;
      r.row(x).maxCoeff(&best);
      p.probs(x, best) = 1.0;
    }
    return p;
  };
  auto margin = [&](const TabularPolicy& p) { return constraint_values(spec, p).minCoeff(); };

  if (nh == 1) {
    res.witness = deterministic(spec.hard_rewards[0].shifted.values);
    res.xi = margin(res.witness);
    return res;
  }

  // Start from the best pointwise maximizer of any single constraint.
  res.xi = -std::numeric_limits<double>::infinity();
  for (const auto& h : spec.hard_rewards) {
    TabularPolicy cand = deterministic(h.shifted.values);
    const double m = margin(cand);
    if (m > res.xi) {
      res.xi = m;
      res.witness = cand;
    }
  }

  TabularPolicy p;
  p.probs = Table::Constant(nx, ny, 1.0 / static_cast<double>(ny));
  const double step0 = 1.0 / std::max(spec.r_max, 1e-12);
  constexpr int kIters = 5000;
  for (int t = 1; t <= kIters; ++t) {
    const Vector cv = constraint_values(spec, p);
    Eigen::Index active = 0;
    const double m = cv.minCoeff(&active);
    if (m > res.xi) {
      res.xi = m;
      res.witness = p;
    }
    // Per-prompt supergradient, rescaled by 1/D(x) so rare prompts still move.
    const Table& g = spec.hard_rewards[static_cast<std::size_t>(active)].shifted.values;
    const double step = step0 / std::sqrt(static_cast<double>(t));
    for (Eigen::Index x = 0; x < nx; ++x) {
      p.probs.row(x) += step * g.row(x);
      project_to_simplex({p.probs.data() + x * ny, static_cast<std::size_t>(ny)});
    }
  }
  const double m = margin(p);
  if (m > res.xi) {
    res.xi = m;
    res.witness = p;
  }
  return res;
}

}  // namespace opd
