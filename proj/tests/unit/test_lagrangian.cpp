#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/problem.hpp"
#include "opd/rng.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace opd;
using opd::test::random_lambda;
using opd::test::random_policy;
using opd::test::small_instances;

namespace {

DualVector one(double v) { return DualVector::constant(1, v); }

double tv_row(const TabularPolicy& a, const TabularPolicy& b) { return max_row_tv(a, b); }

}  // namespace

TEST_CASE("aggregated reward on the toy") {
  const ProblemSpec toy = toy_instance();
  const Table s1 = aggregated_reward(toy, one(1.0)).values;
  CHECK(s1(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s1(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  const Table s0 = aggregated_reward(toy, one(0.0)).values;
  CHECK(s0(0, 0) == 1.0);
  CHECK(s0(0, 1) == 0.0);
  CHECK_THROWS_AS(aggregated_reward(toy, DualVector::zeros(2)), DimensionMismatch);
}

TEST_CASE("aggregated reward with all weight on one objective") {
  ProblemSpec spec = random_instance(3, {3, 4, 3, 1}, 1.0, 0.05);
  for (auto& s : spec.soft_rewards) s.weight = 0.0;
  spec.soft_rewards[1].weight = 1.0;
  CHECK(aggregated_reward(spec, one(0.0)).values == spec.soft_rewards[1].reward.values);
}

TEST_CASE("lagrangian report on the toy") {
  const ProblemSpec toy = toy_instance();
  const auto rep = lagrangian_report(toy, toy.ref_policy, one(0.0));
  CHECK(rep.value == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(rep.kl_to_ref == 0.0);
  for (double lam : {0.0, 0.5, 1.0, 7.0}) {
    const auto r = lagrangian_report(toy, toy.ref_policy, one(lam));
    CHECK(std::abs(r.constraint_values[0]) <= 1e-15);
  }
  TabularPolicy bad;
  bad.probs = Table::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(lagrangian_report(toy, bad, one(0.0)), DimensionMismatch);
}

TEST_CASE("kl divergence values") {
  const std::vector<double> a{0.3, 0.7};
  CHECK(kl_divergence(a, a) == 0.0);
  const std::vector<double> p{0.5, 0.5};
  CHECK(kl_divergence(p, a) == doctest::Approx(0.0871767).epsilon(1e-5));
  const std::vector<double> e{1.0, 0.0};
  CHECK(kl_divergence(e, p) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(kl_divergence(p, e), SupportViolation);
  const std::vector<double> three{0.2, 0.3, 0.5};
  CHECK_THROWS_AS(kl_divergence(p, three), DimensionMismatch);
}

TEST_CASE("kl_to_ref vanishes at the reference") {
  for (const auto& spec : small_instances(10, 11)) {
    CHECK(lagrangian_report(spec, spec.ref_policy, DualVector::zeros(spec.num_constraints()))
              .kl_to_ref == 0.0);
  }
}

TEST_CASE("Pinsker holds on random simplex pairs") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 2 + rng.next_u64() % 8;
    const auto p = rng.dirichlet_flat(n);
    const auto q = rng.dirichlet_flat(n);
    double l1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) l1 += std::abs(p[k] - q[k]);
    CHECK(l1 <= std::sqrt(2.0 * kl_divergence(p, q)) + 1e-12);
  }
}

TEST_CASE("proximal argmax on the toy") {
  const ProblemSpec toy = toy_instance();
  for (double eta : {0.0, 0.1, 3.0, 1e6})
    CHECK(tv_row(proximal_argmax(toy, one(1.0), toy.ref_policy, eta), toy.ref_policy) <= 1e-14);

  const TabularPolicy p = proximal_argmax(toy, one(0.0), toy.ref_policy, 0.0);
  const double expected = 0.3 * std::exp(20.0) / (0.3 * std::exp(20.0) + 0.7);
  CHECK(p.probs(0, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(1.0 - p.probs(0, 0) == doctest::Approx(4.8e-9).epsilon(0.01));
}

TEST_CASE("proximal argmax approaches the anchor for large eta") {
  Rng rng(8);
  for (const auto& spec : small_instances(10, 21)) {
    TabularPolicy anchor = random_policy(rng, spec.num_prompts, spec.num_responses);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 3.0);
    CHECK(max_row_tv(proximal_argmax(spec, lam, anchor, 1e6), anchor) <= 1e-5);
  }
}

TEST_CASE("proximal argmax needs a full-support anchor") {
  const ProblemSpec toy = toy_instance();
  TabularPolicy anchor;
  anchor.probs = Table(1, 2);
  anchor.probs << 1.0, 0.0;
  CHECK_THROWS_AS(proximal_argmax(toy, one(0.0), anchor, 1.0), SupportViolation);
  CHECK_NOTHROW(proximal_argmax(toy, one(0.0), anchor, 0.0));
  CHECK_THROWS_AS(proximal_argmax(toy, one(0.0), toy.ref_policy, -1.0), std::invalid_argument);
}

TEST_CASE("proximal argmax survives large scores") {
  ProblemSpec toy = toy_instance();
  toy.beta = 1e-4;
  const TabularPolicy p = proximal_argmax(toy, one(0.0), toy.ref_policy, 0.0);
  CHECK(std::isfinite(p.probs(0, 0)));
  CHECK(p.probs(0, 0) == 1.0);
}

TEST_CASE("proximal step solves its subproblem") {
  // Objective <pi, S> - beta KL(pi||ref) - eta KL(pi||anchor) is maximized by the closed form.
  Rng rng(31);
  for (const auto& spec : small_instances(8, 41)) {
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 2.0);
    const TabularPolicy anchor = random_policy(rng, spec.num_prompts, spec.num_responses);
    const double eta = rng.uniform(0.1, 3.0);
    auto objective = [&](const TabularPolicy& pi) {
      const auto rep = lagrangian_report(spec, pi, lam);
      return rep.value - eta * expected_kl(spec.prompt_dist, pi, anchor);
    };
    const double best = objective(proximal_argmax(spec, lam, anchor, eta));
    for (int i = 0; i < 500; ++i)
      CHECK(objective(random_policy(rng, spec.num_prompts, spec.num_responses)) <= best + 1e-10);
  }
}

TEST_CASE("closed-form policy beats random policies") {
  Rng rng(77);
  for (const auto& spec : small_instances(5, 51, {5, 5, 2, 2})) {
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 2.0);
    const double best = lagrangian_report(spec, optimal_policy(spec, lam), lam).value;
    for (int i = 0; i < 2000; ++i) {
      const auto pi = random_policy(rng, spec.num_prompts, spec.num_responses);
      CHECK(lagrangian_report(spec, pi, lam).value <= best + 1e-10);
    }
  }
}

TEST_CASE("report reconstruction identity") {
  Rng rng(3);
  for (const auto& spec : small_instances(20, 61)) {
    const auto pi = random_policy(rng, spec.num_prompts, spec.num_responses);
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 5.0);
    const auto rep = lagrangian_report(spec, pi, lam);
    const double rebuilt =
        rep.soft_value + lam.lambdas.dot(rep.constraint_values) - spec.beta * rep.kl_to_ref;
    CHECK(std::abs(rep.value - rebuilt) <= 1e-10);
    // Independent evaluation straight from the tables.
    const Table s = aggregated_reward(spec, lam).values;
    double direct = 0.0;
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x)
      for (Eigen::Index y = 0; y < spec.num_responses; ++y) {
        const double p = pi.probs(x, y);
        direct += spec.prompt_dist[x] * p *
                  (s(x, y) - spec.beta * std::log(p / spec.ref_policy.probs(x, y)));
      }
    CHECK(std::abs(rep.value - direct) <= 1e-10);
  }
}

TEST_CASE("dual function on the toy") {
  const ProblemSpec toy = toy_instance();
  const auto d = dual_function(toy, one(1.0));
  CHECK(d.value == doctest::Approx(0.3).epsilon(1e-14));
  REQUIRE(d.gradient.size() == 1);
  CHECK(std::abs(d.gradient[0]) <= 1e-14);
}

TEST_CASE("dual gradient matches central differences") {
  Rng rng(13);
  for (const auto& spec : small_instances(20, 71)) {
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 3.0);
    const auto d = dual_function(spec, lam);
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      DualVector up = lam, down = lam;
      up[j] += 1e-6;
      down[j] -= 1e-6;
      const double fd = (dual_function(spec, up).value - dual_function(spec, down).value) / 2e-6;
      CHECK(std::abs(fd - d.gradient[j]) <= 1e-6);
    }
  }
}

TEST_CASE("dual function is convex along segments and equals the primal max") {
  Rng rng(17);
  for (const auto& spec : small_instances(15, 81)) {
    for (int i = 0; i < 20; ++i) {
      const DualVector a = random_lambda(rng, spec.num_constraints(), 5.0);
      const DualVector b = random_lambda(rng, spec.num_constraints(), 5.0);
      const DualVector mid((a.lambdas + b.lambdas) / 2.0);
      const double lhs = dual_function(spec, mid).value;
      const double rhs = 0.5 * (dual_function(spec, a).value + dual_function(spec, b).value);
      CHECK(lhs <= rhs + 1e-10);
    }
    const DualVector lam = random_lambda(rng, spec.num_constraints(), 5.0);
    CHECK(dual_function(spec, lam).value ==
          doctest::Approx(lagrangian_report(spec, optimal_policy(spec, lam), lam).value)
              .epsilon(1e-12));
  }
}

TEST_CASE("simplex projection") {
  std::vector<double> v{0.2, 0.3, 0.5};
  project_to_simplex(v);
  CHECK(v[0] == doctest::Approx(0.2));
  CHECK(v[2] == doctest::Approx(0.5));
  std::vector<double> w{2.0, 0.0, -1.0};
  project_to_simplex(w);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 0.0);
  std::vector<double> u{0.5, 0.5, 0.5, 0.5};
  project_to_simplex(u);
  for (double e : u) CHECK(e == doctest::Approx(0.25));
}

TEST_CASE("slater margin on the toy") {
  const auto s = slater_margin(toy_instance());
  CHECK(s.xi == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.witness.probs(0, 0) == 0.0);
  CHECK(s.witness.probs(0, 1) == 1.0);
}

TEST_CASE("slater margin with a common maximizer") {
  Rng rng(90);
  for (int trial = 0; trial < 10; ++trial) {
    ProblemSpec spec = random_instance(100 + trial, {3, 4, 1, 1}, 1.0, 0.05);
    spec.hard_rewards.clear();
    const Eigen::Index best = static_cast<Eigen::Index>(rng.next_u64() % 4);
    for (int j = 0; j < 3; ++j) {
      Table r(3, 4);
      for (Eigen::Index x = 0; x < 3; ++x)
        for (Eigen::Index y = 0; y < 4; ++y) r(x, y) = rng.uniform(-0.6, 0.5);
      for (Eigen::Index x = 0; x < 3; ++x) r(x, best) = rng.uniform(0.6, 1.0);
      spec.add_constraint(r, rng.uniform(0.0, 0.3));
    }
    REQUIRE(validate(spec).empty());
    double common = std::numeric_limits<double>::infinity();
    for (const auto& h : spec.hard_rewards) {
      double v = 0.0;
      for (Eigen::Index x = 0; x < 3; ++x) v += spec.prompt_dist[x] * h.shifted.values(x, best);
      common = std::min(common, v);
    }
    CHECK(slater_margin(spec).xi == doctest::Approx(common).epsilon(1e-12));
  }
}

TEST_CASE("single-constraint slater margin matches enumeration") {
  Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index nx = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    const Eigen::Index ny = 2 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    ProblemSpec spec;
    try {
      spec = random_instance(rng.next_u64(), {nx, ny, 1, 1}, 1.0, 0.05);
    } catch (const InstanceRejection&) {
      continue;
    }
    const Table& r = spec.hard_rewards[0].shifted.values;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> choice(static_cast<std::size_t>(nx), 0);
    while (true) {
      double v = 0.0;
      for (Eigen::Index x = 0; x < nx; ++x)
        v += spec.prompt_dist[x] * r(x, choice[static_cast<std::size_t>(x)]);
      best = std::max(best, v);
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] == ny) choice[k++] = 0;
      if (k == choice.size()) break;
    }
    const auto s = slater_margin(spec);
    CHECK(s.xi == doctest::Approx(best).epsilon(1e-14));
    CHECK(constraint_values(spec, s.witness)[0] == doctest::Approx(s.xi).epsilon(1e-14));
  }
}

TEST_CASE("multi-constraint slater witness attains its margin") {
  for (const auto& spec : small_instances(10, 91, {4, 5, 1, 3})) {
    const auto s = slater_margin(spec);
    CHECK(constraint_values(spec, s.witness).minCoeff() == doctest::Approx(s.xi).epsilon(1e-12));
    CHECK(s.xi >= kSlaterMarginFraction - 1e-12);
  }
}
