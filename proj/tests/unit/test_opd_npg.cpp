#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/opd_dist.hpp"
#include "opd/opd_npg.hpp"
#include "opd/oracle.hpp"
#include "opd/problem.hpp"
#include "opd/theory.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace opd;
using opd::test::random_lambda;
using opd::test::random_policy;
using opd::test::small_instances;

namespace {

SoftmaxParams random_theta(Rng& rng, Eigen::Index nx, Eigen::Index ny) {
  SoftmaxParams t{Table(nx, ny)};
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) t.logits(x, y) = rng.uniform(-2.0, 2.0);
  t.center();
  return t;
}

ProblemSpec single_prompt(const TabularPolicy& ref) {
  ProblemSpec spec = toy_instance();
  spec.ref_policy = ref;
  return spec;
}

}  // namespace

TEST_CASE("fisher block examples") {
  TabularPolicy p;
  p.probs = Table(1, 2);
  p.probs << 0.3, 0.7;
  const ProblemSpec spec = single_prompt(p);
  const auto blocks = fisher(spec, SoftmaxParams::from_policy(p));
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0](0, 0) == doctest::Approx(0.21).epsilon(1e-14));
  CHECK(blocks[0](0, 1) == doctest::Approx(-0.21).epsilon(1e-14));
  CHECK(blocks[0](1, 0) == doctest::Approx(-0.21).epsilon(1e-14));
  CHECK(blocks[0](1, 1) == doctest::Approx(0.21).epsilon(1e-14));

  p.probs << 0.5, 0.5;
  const auto uni = fisher(single_prompt(p), SoftmaxParams::from_policy(p));
  CHECK(uni[0](0, 0) == doctest::Approx(0.25));
  CHECK(uni[0](0, 1) == doctest::Approx(-0.25));
}

TEST_CASE("fisher blocks are symmetric PSD with zero row sums") {
  Rng rng(1);
  for (const auto& spec : small_instances(15, 1201, {5, 6, 1, 1})) {
    const SoftmaxParams theta = random_theta(rng, spec.num_prompts, spec.num_responses);
    const auto blocks = fisher(spec, theta);
    const TabularPolicy p = theta.policy();
    CHECK(blocks.size() == static_cast<std::size_t>(spec.num_prompts));
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
      const Eigen::MatrixXd& f = blocks[static_cast<std::size_t>(x)];
      CHECK(f == f.transpose());
      CHECK(f.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-15);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
      // Exactly one null direction when D(x) > 0.
      int small = 0;
      for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        if (eig.eigenvalues()[i] <= 1e-12 * eig.eigenvalues().maxCoeff()) ++small;
      CHECK(small == 1);
      const double d = spec.prompt_dist[x];
      CHECK(f(0, 0) == doctest::Approx(d * p.probs(x, 0) * (1.0 - p.probs(x, 0))).epsilon(1e-12));
    }
  }
}

TEST_CASE("policy gradient on the toy") {
  const ProblemSpec toy = toy_instance();
  const SoftmaxParams theta = SoftmaxParams::from_policy(toy.ref_policy);
  const Table g = policy_gradient(toy, theta, DualVector::zeros(1));
  CHECK(g(0, 0) == doctest::Approx(0.21).epsilon(1e-14));
  CHECK(g(0, 1) == doctest::Approx(-0.21).epsilon(1e-14));
  const Table at_saddle = policy_gradient(toy, theta, DualVector::constant(1, 1.0));
  CHECK(at_saddle.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("policy gradient matches central differences") {
  Rng rng(2);
  for (const auto& spec : small_instances(20, 1301, {5, 6, 2, 2})) {
    const SoftmaxParams theta = random_theta(rng, spec.num_prompts, spec.num_responses);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 3.0);
    const Table g = policy_gradient(spec, theta, lam);
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
      for (Eigen::Index y = 0; y < spec.num_responses; ++y) {
        SoftmaxParams up = theta, down = theta;
        up.logits(x, y) += 1e-6;
        down.logits(x, y) -= 1e-6;
        const double fd = (lagrangian_report(spec, up.policy(), lam).value -
                           lagrangian_report(spec, down.policy(), lam).value) /
                          2e-6;
        CHECK(std::abs(fd - g(x, y)) <= 1e-5);
      }
    }
  }
}

TEST_CASE("advantage is centered under the policy") {
  Rng rng(3);
  for (const auto& spec : small_instances(20, 1401)) {
    const auto pi = random_policy(rng, spec.num_prompts, spec.num_responses);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 5.0);
    const Table a = advantage(spec, pi, lam);
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x)
      CHECK(std::abs(a.row(x).dot(pi.probs.row(x))) <= 1e-10);
  }
  const ProblemSpec toy = toy_instance();
  const Table a = advantage(toy, toy.ref_policy, DualVector::zeros(1));
  CHECK(a(0, 0) == doctest::Approx(0.7));
  CHECK(a(0, 1) == doctest::Approx(-0.3));
}

TEST_CASE("softmax params stay centered and reproduce the policy") {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto pi = random_policy(rng, 3, 5);
    const SoftmaxParams t = SoftmaxParams::from_policy(pi);
    CHECK(t.logits.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(max_row_tv(t.policy(), pi) <= 1e-14);
  }
  TabularPolicy zero;
  zero.probs = Table(1, 2);
  zero.probs << 1.0, 0.0;
  CHECK_THROWS_AS(SoftmaxParams::from_policy(zero), SupportViolation);
}

TEST_CASE("both primal paths agree with the proximal step") {
  Rng rng(5);
  for (const auto& spec : small_instances(20, 1501, {5, 6, 2, 2})) {
    const SoftmaxParams theta = random_theta(rng, spec.num_prompts, spec.num_responses);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 3.0);
    const double eta = rng.uniform(0.2, 5.0);
    const auto adv = npg_primal_step(spec, theta, lam, eta, NpgPath::advantage).policy();
    const auto pinv = npg_primal_step(spec, theta, lam, eta, NpgPath::pseudoinverse).policy();
    const auto prox = proximal_argmax(spec, lam, theta.policy(), eta);
    CHECK(max_row_tv(adv, pinv) <= 1e-8);
    CHECK(max_row_tv(adv, prox) <= 1e-10);
  }
}

TEST_CASE("zero advantage leaves the logits unchanged") {
  const ProblemSpec toy = toy_instance();
  const SoftmaxParams theta = SoftmaxParams::from_policy(toy.ref_policy);
  const SoftmaxParams next =
      npg_primal_step(toy, theta, DualVector::constant(1, 1.0), 3.0, NpgPath::advantage);
  CHECK((next.logits - theta.logits).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("gauge shifts do not change the update") {
  Rng rng(6);
  for (const auto& spec : small_instances(10, 1601)) {
    const SoftmaxParams theta = random_theta(rng, spec.num_prompts, spec.num_responses);
    SoftmaxParams shifted = theta;
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x)
      shifted.logits.row(x).array() += rng.uniform(-50.0, 50.0);
    CHECK(max_row_tv(shifted.policy(), theta.policy()) <= 1e-14);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 2.0);
    for (NpgPath path : {NpgPath::advantage, NpgPath::pseudoinverse}) {
      const auto a = npg_primal_step(spec, theta, lam, 2.0, path);
      const auto b = npg_primal_step(spec, shifted, lam, 2.0, path);
      CHECK((a.logits - b.logits).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("optional logit clamp") {
  ProblemSpec toy = toy_instance();
  const SoftmaxParams theta = SoftmaxParams::from_policy(toy.ref_policy);
  const auto next = npg_primal_step(toy, theta, DualVector::zeros(1), 0.01, NpgPath::advantage, 0.1);
  CHECK(next.logits.cwiseAbs().maxCoeff() <= std::log(10.0) + 1e-15);
}

TEST_CASE("collapsed policies are rejected") {
  const ProblemSpec toy = toy_instance();
  SoftmaxParams theta{Table(1, 2)};
  theta.logits << 5000.0, -5000.0;
  CHECK_THROWS_AS(npg_primal_step(toy, theta, DualVector::zeros(1), 3.0, NpgPath::pseudoinverse),
                  DegenerateFisher);
  CHECK_THROWS_AS(npg_primal_step(toy, theta, DualVector::zeros(1), 3.0, NpgPath::advantage),
                  DegenerateFisher);
}

TEST_CASE("NPG iterates match the distributional method") {
  for (const auto& spec : small_instances(5, 1701, {5, 6, 2, 2})) {
    NpgConfig cfg = default_npg_config(spec);
    cfg.opd.max_iters = 100;
    CHECK(cfg.opd.dual_step_scale == 1.0);
    const auto dist = opd_run(spec, cfg.opd);
    for (NpgPath path : {NpgPath::advantage, NpgPath::pseudoinverse}) {
      cfg.path = path;
      const auto npg = npg_run(spec, cfg);
      REQUIRE(npg.trace.size() == dist.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < dist.size(); ++i)
        worst = std::max(worst, max_row_tv(npg.trace.records[i].policy, dist.records[i].policy));
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("toy at the reference step sizes") {
  const ProblemSpec toy = toy_instance();
  const SaddleSolution sol = solve_saddle(toy);
  NpgConfig cfg;
  cfg.opd.eta_theta = 1.0 / 0.6 - toy.beta;
  cfg.opd.eta_lambda = 1.0 / 0.6;
  cfg.opd.dual_step_scale = 1.0;
  cfg.opd.max_iters = 300;
  const auto res = npg_run(toy, cfg, &sol);
  CHECK(*res.trace.final_distance() <= 1e-8);
  CHECK(res.gap == 0.0);
}

// Known to fail: the toy contracts too slowly at eta = 3 to reach 1e-8 in
// 300 iterations (about 3e-6 here); 1500 iterations suffice.
TEST_CASE("toy at recommended steps converges in 300 iterations" * doctest::may_fail()) {
  const ProblemSpec toy = toy_instance();
  const SaddleSolution sol = solve_saddle(toy);
  NpgConfig cfg = default_npg_config(toy);
  cfg.opd.max_iters = 300;
  CHECK(*npg_run(toy, cfg, &sol).trace.final_distance() <= 1e-8);
}

TEST_CASE("toy at recommended steps converges with more iterations") {
  const ProblemSpec toy = toy_instance();
  const SaddleSolution sol = solve_saddle(toy);
  NpgConfig cfg = default_npg_config(toy);
  cfg.opd.max_iters = 1500;
  CHECK(*npg_run(toy, cfg, &sol).trace.final_distance() <= 1e-8);
}

TEST_CASE("noisy primal steps settle inside the neighborhood") {
  const ProblemSpec toy = toy_instance();
  const SaddleSolution sol = solve_saddle(toy);
  NpgConfig cfg = default_npg_config(toy);
  cfg.opd.max_iters = 600;
  const auto res = npg_run(toy, cfg, &sol, ApproxNoise{1e-3, 7});
  CHECK(res.lipschitz_proxy > 0.0);
  CHECK(res.lipschitz_used == res.lipschitz_proxy);
  CHECK(res.g_max == doctest::Approx(score_bound(toy)));
  CHECK(res.gap == doctest::Approx(gap_bound(1e-3, toy.p_min(), res.g_max, 3.0, toy.beta,
                                             res.lipschitz_proxy)));
  CHECK(res.neighborhood == doctest::Approx(2.0 * res.gap / (1.0 - rho(toy))));
  CHECK(*res.trace.final_distance() <= res.neighborhood);
  CHECK(*res.trace.final_distance() > 0.0);
  for (const auto& r : res.trace.records) {
    REQUIRE(r.bound.has_value());
    CHECK(*r.bound >= 2.0 * (1.0 - std::pow(res.rho, static_cast<double>(r.iter))) /
                           (1.0 - res.rho) * res.gap);
  }
}

TEST_CASE("zero noise reproduces the noiseless run") {
  const ProblemSpec spec = random_instance(31, {3, 4, 1, 2}, 1.0, 0.05);
  NpgConfig cfg = default_npg_config(spec);
  cfg.opd.max_iters = 40;
  const auto plain = npg_run(spec, cfg);
  const auto zero = npg_run(spec, cfg, nullptr, ApproxNoise{0.0, 99});
  for (std::size_t i = 0; i < plain.trace.size(); ++i) {
    CHECK(plain.trace.records[i].policy.probs == zero.trace.records[i].policy.probs);
    CHECK(plain.trace.records[i].lambda.lambdas == zero.trace.records[i].lambda.lambdas);
  }
  CHECK(zero.gap == 0.0);
  CHECK_THROWS_AS(npg_run(spec, cfg, nullptr, ApproxNoise{-1.0, 0}), std::invalid_argument);
}

TEST_CASE("noise is seeded") {
  const ProblemSpec toy = toy_instance();
  NpgConfig cfg = default_npg_config(toy);
  cfg.opd.max_iters = 30;
  const auto a = npg_run(toy, cfg, nullptr, ApproxNoise{1e-2, 5});
  const auto b = npg_run(toy, cfg, nullptr, ApproxNoise{1e-2, 5});
  const auto c = npg_run(toy, cfg, nullptr, ApproxNoise{1e-2, 6});
  CHECK(a.trace.final_record().policy.probs == b.trace.final_record().policy.probs);
  CHECK(a.trace.final_record().policy.probs != c.trace.final_record().policy.probs);
}
