#include "opd/oracle.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/theory.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace opd {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxDualIterations = 1'000'000;

struct BoxSearch {
  DualVector lambda;
  std::size_t iterations = 0;
};

// Scalar case: golden-section on the dual value, then bisection on its
// derivative, which is nondecreasing in lambda.
BoxSearch solve_scalar(const ProblemSpec& spec, double cap, double tol) {
  auto grad = [&](double l) { return dual_function(spec, DualVector::constant(1, l)).gradient[0]; };
  auto value = [&](double l) { return dual_function(spec, DualVector::constant(1, l)).value; };
  BoxSearch out;
  out.lambda = DualVector::zeros(1);
  if (grad(0.0) >= 0.0) return out;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = cap;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = value(c);
  double fd = value(d);
  while (b - a > 1e-6 * std::max(1.0, cap) && out.iterations < kMaxDualIterations) {
    ++out.iterations;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value(d);
    }
  }

  // Widen the golden bracket until the derivative changes sign across it.
  double width = std::max(b - a, 1e-12);
  double lo = std::max(0.0, a);
  double hi = std::min(cap, b);
  while (lo > 0.0 && grad(lo) > 0.0) lo = std::max(0.0, lo - (width *= 2.0));
  width = std::max(b - a, 1e-12);
  while (hi < cap && grad(hi) < 0.0) hi = std::min(cap, hi + (width *= 2.0));

  double mid = 0.5 * (lo + hi);
  while (out.iterations < kMaxDualIterations) {
    ++out.iterations;
    mid = 0.5 * (lo + hi);
    const double g = grad(mid);
    if (std::abs(g) <= 0.1 * tol || mid <= lo || mid >= hi) break;
    (g < 0.0 ? lo : hi) = mid;
  }
  out.lambda = DualVector::constant(1, mid);
  return out;
}

double projected_gradient_norm(const Vector& lambda, const Vector& grad, double cap) {
  return (lambda - (lambda - grad).cwiseMax(0.0).cwiseMin(cap)).norm();
}

// Projected gradient with Barzilai-Borwein steps and Armijo backtracking,
// never shrinking below 1/L where L bounds the dual Hessian.
BoxSearch solve_box(const ProblemSpec& spec, double cap, double tol) {
  const Eigen::Index nh = spec.num_constraints();
  double lipschitz = 0.0;
  for (const auto& h : spec.hard_rewards) {
    const Table& r = h.shifted.values;
    const Vector range = r.rowwise().maxCoeff() - r.rowwise().minCoeff();
    lipschitz += 0.25 * range.array().square().maxCoeff() / spec.beta;
  }
  const double safe_step = 1.0 / std::max(lipschitz, 1e-300);

  BoxSearch out;
  Vector lambda = Vector::Zero(nh);
  DualValue cur = dual_function(spec, DualVector(lambda));
  double step = safe_step;
  while (out.iterations < kMaxDualIterations) {
    if (projected_gradient_norm(lambda, cur.gradient, cap) <= 0.1 * tol) break;
    const auto res = kkt_residuals(spec, optimal_policy(spec, DualVector(lambda)), DualVector(lambda));
    if (res.max() <= 0.1 * tol) break;
    ++out.iterations;

    double alpha = std::max(step, safe_step);
    Vector next;
    DualValue trial;
    while (true) {
      next = (lambda - alpha * cur.gradient).cwiseMax(0.0).cwiseMin(cap);
      trial = dual_function(spec, DualVector(next));
      const double decrease = cur.gradient.dot(next - lambda);
      if (trial.value <= cur.value + 1e-4 * decrease || alpha <= safe_step) break;
      alpha = std::max(0.5 * alpha, safe_step);
    }
    const Vector s = next - lambda;
    const Vector y = trial.gradient - cur.gradient;
    const double sy = s.dot(y);
    step = sy > 0.0 ? s.squaredNorm() / sy : safe_step;
    if (s.squaredNorm() == 0.0) break;
    lambda = next;
    cur = trial;
  }
  out.lambda = DualVector(lambda);
  return out;
}

bool flat_dual(const ProblemSpec& spec, const TabularPolicy& policy) {
  const Eigen::Index nh = spec.num_constraints();
  if (nh == 0) return false;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(nh, nh);
  for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
    Eigen::MatrixXd r(nh, spec.num_responses);
    for (Eigen::Index j = 0; j < nh; ++j)
      r.row(j) = spec.hard_rewards[static_cast<std::size_t>(j)].shifted.values.row(x);
    const Eigen::VectorXd p = policy.probs.row(x).transpose();
    const Eigen::VectorXd mean = r * p;
    const Eigen::MatrixXd centered = r.colwise() - mean;
    cov += spec.prompt_dist[x] * centered * p.asDiagonal() * centered.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  return eig.eigenvalues().minCoeff() <= 1e-12 * std::max(top, spec.r_max * spec.r_max);
}

json vec_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw SchemaError(std::string("field \"") + field + "\" must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(std::string("field \"") + field + "\" must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError(std::string("missing field \"") + field + "\"");
  return *it;
}

}  // namespace

double KktResiduals::max() const {
  double m = dual_gradient_norm;
  if (feasibility.size() > 0) m = std::max(m, feasibility.maxCoeff());
  if (slackness.size() > 0) m = std::max(m, slackness.maxCoeff());
  return m;
}

KktResiduals kkt_residuals(const ProblemSpec& spec, const TabularPolicy& policy,
                           const DualVector& lambda) {
  if (lambda.size() != spec.num_constraints())
    throw DimensionMismatch("kkt_residuals: dual vector has the wrong length");
  const Vector g = constraint_values(spec, policy);
  KktResiduals r;
  r.feasibility = (-g).cwiseMax(0.0);
  r.slackness = lambda.lambdas.cwiseProduct(g).cwiseAbs();
  r.dual_gradient_norm = (lambda.lambdas - (lambda.lambdas - g).cwiseMax(0.0)).norm();
  return r;
}

SaddleSolution solve_saddle(const ProblemSpec& spec, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_saddle: tol must be positive");
  SaddleSolution sol;
  if (spec.num_constraints() == 0) {
    sol.lambda_star = DualVector::zeros(0);
  } else {
    const double cap = lambda_max(spec);
    const BoxSearch found = spec.num_constraints() == 1 ? solve_scalar(spec, cap, tol)
                                                         : solve_box(spec, cap, tol);
    sol.lambda_star = found.lambda;
    sol.iterations = found.iterations;
  }
  sol.policy_star = optimal_policy(spec, sol.lambda_star);
  sol.kkt = kkt_residuals(spec, sol.policy_star, sol.lambda_star);
  sol.dual_value = dual_function(spec, sol.lambda_star).value;
  sol.degenerate = flat_dual(spec, sol.policy_star);
  if (!(sol.kkt.max() <= 10.0 * tol))
    throw NoConvergence("solve_saddle: KKT residual " + std::to_string(sol.kkt.max()) +
                        " above tolerance after " + std::to_string(sol.iterations) +
                        " dual iterations");
  return sol;
}

double distance(const ProblemSpec& spec, const SaddleSolution& solution,
                const TabularPolicy& policy, const DualVector& lambda) {
  if (lambda.size() != solution.lambda_star.size())
    throw DimensionMismatch("distance: dual vector has the wrong length");
  return expected_kl(spec.prompt_dist, solution.policy_star, policy) +
         (solution.lambda_star.lambdas - lambda.lambdas).squaredNorm();
}

std::string to_json(const SaddleSolution& solution) {
  json j;
  json rows = json::array();
  const Table& p = solution.policy_star.probs;
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    const auto r = row_span(p, x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["policy_star"] = std::move(rows);
  j["lambda_star"] = vec_to_json(solution.lambda_star.lambdas);
  j["kkt"] = {{"feasibility", vec_to_json(solution.kkt.feasibility)},
              {"slackness", vec_to_json(solution.kkt.slackness)},
              {"dual_gradient_norm", solution.kkt.dual_gradient_norm}};
  j["dual_value"] = solution.dual_value;
  j["iterations"] = solution.iterations;
  j["degenerate"] = solution.degenerate;
  return j.dump(2) + "\n";
}

SaddleSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("solution file is not valid JSON: ") + e.what());
  }
  SaddleSolution sol;
  const auto& rows = require(j, "policy_star");
  if (!rows.is_array() || rows.empty()) throw SchemaError("field \"policy_star\" must be a non-empty array");
  const auto ny = static_cast<Eigen::Index>(rows.front().size());
  sol.policy_star.probs = Table(static_cast<Eigen::Index>(rows.size()), ny);
  for (std::size_t x = 0; x < rows.size(); ++x) {
    const Vector r = vec_from_json(rows[x], "policy_star");
    if (r.size() != ny) throw SchemaError("field \"policy_star\" has a ragged row");
    sol.policy_star.probs.row(static_cast<Eigen::Index>(x)) = r.transpose();
  }
  sol.lambda_star = DualVector(vec_from_json(require(j, "lambda_star"), "lambda_star"));
  const auto& kkt = require(j, "kkt");
  sol.kkt.feasibility = vec_from_json(require(kkt, "feasibility"), "feasibility");
  sol.kkt.slackness = vec_from_json(require(kkt, "slackness"), "slackness");
  sol.kkt.dual_gradient_norm = require(kkt, "dual_gradient_norm").get<double>();
  sol.dual_value = require(j, "dual_value").get<double>();
  sol.iterations = require(j, "iterations").get<std::size_t>();
  sol.degenerate = require(j, "degenerate").get<bool>();
  return sol;
}

void save_solution(const SaddleSolution& solution, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_json(solution);
}

SaddleSolution load_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return solution_from_json(buf.str());
}

}  // namespace opd
