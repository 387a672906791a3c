#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/problem.hpp"
#include "opd/rng.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

using namespace opd;

namespace {

bool names(const std::vector<Violation>& report, const std::string& text) {
  return std::any_of(report.begin(), report.end(), [&](const Violation& v) {
    return v.invariant.find(text) != std::string::npos || v.message.find(text) != std::string::npos;
  });
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "opd_test_problem";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("rng is reproducible and streams differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng s0 = Rng(42).split(0), s1 = Rng(42).split(1);
  CHECK(s0.next_u64() != s1.next_u64());
  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const auto d = c.dirichlet_flat(5);
  double total = 0.0;
  for (double v : d) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("toy instance values") {
  const ProblemSpec toy = toy_instance();
  CHECK(validate(toy).empty());
  CHECK(toy.num_prompts == 1);
  CHECK(toy.num_responses == 2);
  REQUIRE(toy.soft_rewards.size() == 1);
  CHECK(toy.soft_rewards[0].weight == 1.0);
  CHECK(toy.soft_rewards[0].reward.values(0, 0) == 1.0);
  CHECK(toy.soft_rewards[0].reward.values(0, 1) == 0.0);
  REQUIRE(toy.hard_rewards.size() == 1);
  CHECK(toy.hard_rewards[0].raw.values(0, 0) == -0.7);
  CHECK(toy.hard_rewards[0].raw.values(0, 1) == 0.3);
  CHECK(toy.hard_rewards[0].threshold == 0.0);
  CHECK(toy.beta == 0.05);
  CHECK(toy.ref_policy.probs(0, 0) == 0.3);
  CHECK(toy.ref_policy.probs(0, 1) == 0.7);
  CHECK(toy.r_max == 1.0);
}

TEST_CASE("validate reports a prompt distribution summing to 1.2") {
  ProblemSpec spec = toy_instance();
  spec.num_prompts = 2;
  spec.prompt_dist = Vector(2);
  spec.prompt_dist << 0.6, 0.6;
  spec.ref_policy.probs = Table(2, 2);
  spec.ref_policy.probs << 0.3, 0.7, 0.3, 0.7;
  Table r(2, 2);
  r << 1, 0, 1, 0;
  spec.soft_rewards[0].reward.values = r;
  Table h(2, 2);
  h << -0.7, 0.3, -0.7, 0.3;
  spec.hard_rewards.clear();
  spec.add_constraint(h, 0.0);
  const auto report = validate(spec);
  REQUIRE(report.size() == 1);
  CHECK(names(report, "prompt_dist sums to 1.2"));
}

TEST_CASE("validate reports a reference policy without full support") {
  ProblemSpec spec = toy_instance();
  spec.ref_policy.probs << 0.0, 1.0;
  const auto report = validate(spec);
  REQUIRE_FALSE(report.empty());
  CHECK(names(report, "full support"));
  CHECK(report.front().index == 0);
}

TEST_CASE("validate catches other broken invariants") {
  SUBCASE("negative beta") {
    ProblemSpec spec = toy_instance();
    spec.beta = -1.0;
    CHECK(names(validate(spec), "beta positive"));
  }
  SUBCASE("weights") {
    ProblemSpec spec = toy_instance();
    spec.soft_rewards[0].weight = 0.5;
    CHECK(names(validate(spec), "soft weights sum to 1"));
  }
  SUBCASE("reward above r_max") {
    ProblemSpec spec = toy_instance();
    spec.r_max = 0.5;
    CHECK(names(validate(spec), "bounded by r_max"));
  }
  SUBCASE("stale shifted table") {
    ProblemSpec spec = toy_instance();
    spec.hard_rewards[0].threshold = 0.1;
    const auto report = validate(spec);
    CHECK(names(report, "shifted reward reconstruction"));
    CHECK(report.front().index == 0);
  }
  SUBCASE("wrong table shape") {
    ProblemSpec spec = toy_instance();
    spec.soft_rewards[0].reward.values = Table::Zero(1, 3);
    CHECK(names(validate(spec), "dimensions"));
  }
}

TEST_CASE("random instance examples") {
  const ProblemSpec a = random_instance(1, {3, 4, 1, 1}, 1.0, 0.05);
  CHECK(validate(a).empty());
  CHECK(slater_margin(a).xi >= 0.05);

  const ProblemSpec b = random_instance(2, {2, 2, 1, 1}, 1.0, 0.1);
  CHECK(b.ref_policy.probs.minCoeff() >= 0.1);

  CHECK(to_json(random_instance(9, {3, 4, 2, 2}, 1.0, 0.05)) ==
        to_json(random_instance(9, {3, 4, 2, 2}, 1.0, 0.05)));
  CHECK(to_json(random_instance(9, {3, 4, 2, 2}, 1.0, 0.05)) !=
        to_json(random_instance(10, {3, 4, 2, 2}, 1.0, 0.05)));
}

TEST_CASE("random instance argument checks") {
  CHECK_THROWS_AS(random_instance(1, {0, 4, 1, 1}, 1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(random_instance(1, {2, 4, 1, 1}, 1.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(random_instance(1, {2, 4, 1, 1}, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("generated instances satisfy every invariant") {
  Rng rng(2024);
  for (int i = 0; i < 40; ++i) {
    const InstanceSizes s{1 + static_cast<Eigen::Index>(rng.next_u64() % 5),
                          2 + static_cast<Eigen::Index>(rng.next_u64() % 5),
                          1 + static_cast<Eigen::Index>(rng.next_u64() % 3),
                          1 + static_cast<Eigen::Index>(rng.next_u64() % 3)};
    const double p_floor = 0.01 + 0.1 * rng.uniform() / static_cast<double>(s.num_responses);
    const std::uint64_t seed = rng.next_u64();
    ProblemSpec spec;
    try {
      spec = random_instance(seed, s, 1.0, p_floor);
    } catch (const InstanceRejection&) {
      continue;
    }
    INFO("seed " << seed);
    CHECK(validate(spec).empty());
    CHECK(spec.p_min() >= p_floor - 1e-15);
    CHECK(slater_margin(spec).xi >= kSlaterMarginFraction * 1.0 - 1e-12);
    for (const auto& h : spec.hard_rewards) {
      const Table rebuilt = h.raw.values.array() - h.threshold;
      CHECK(rebuilt == h.shifted.values);
    }
  }
}

TEST_CASE("save and load round-trip bit-exactly") {
  const auto path = scratch("toy.json");
  save(toy_instance(), path);
  CHECK(load(path) == toy_instance());

  const ProblemSpec spec = random_instance(5, {4, 5, 2, 2}, 1.0, 0.03);
  save(spec, path);
  const ProblemSpec back = load(path);
  CHECK(back == spec);
  CHECK(to_json(back) == to_json(spec));
}

TEST_CASE("loading a file without beta names the field") {
  auto j = nlohmann::json::parse(to_json(toy_instance()));
  j.erase("beta");
  const auto path = scratch("no_beta.json");
  std::ofstream(path) << j.dump();
  try {
    load(path);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
}

TEST_CASE("loading a file with negative beta is a validation error") {
  auto j = nlohmann::json::parse(to_json(toy_instance()));
  j["beta"] = -0.05;
  CHECK_THROWS_AS(problem_from_json(j.dump()), ValidationError);
  CHECK_THROWS_AS(problem_from_json("{not json"), SchemaError);
  CHECK_THROWS_AS(load(scratch("does_not_exist.json")), Error);
}
