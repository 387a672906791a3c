#include "opd/opd_dist.hpp"
#include "opd/opd_npg.hpp"
#include "opd/oracle.hpp"
#include "opd/problem.hpp"

#include <benchmark/benchmark.h>

using namespace opd;

namespace {

ProblemSpec instance(benchmark::State& state) {
  const auto ny = static_cast<Eigen::Index>(state.range(0));
  return random_instance(3, {5, ny, 1, 2}, 1.0, 0.5 / static_cast<double>(ny));
}

void BM_OpdStep(benchmark::State& state) {
  const ProblemSpec spec = instance(state);
  const OPDConfig cfg = recommended_stepsizes(spec);
  OPDState s = initial_state(spec);
  for (auto _ : state) {
    s = opd_step(spec, s, cfg);
    benchmark::DoNotOptimize(s.hat_policy.probs.data());
  }
}
BENCHMARK(BM_OpdStep)->Arg(6)->Arg(32)->Arg(256);

void BM_NpgPrimalStep(benchmark::State& state) {
  const ProblemSpec spec = instance(state);
  const SoftmaxParams theta = SoftmaxParams::from_policy(spec.ref_policy);
  const DualVector lam = DualVector::constant(spec.num_constraints(), 0.5);
  const auto path = state.range(1) ? NpgPath::pseudoinverse : NpgPath::advantage;
  for (auto _ : state) benchmark::DoNotOptimize(npg_primal_step(spec, theta, lam, 3.0, path));
}
BENCHMARK(BM_NpgPrimalStep)->Args({6, 0})->Args({6, 1})->Args({32, 0})->Args({32, 1});

void BM_SolveSaddle(benchmark::State& state) {
  const ProblemSpec spec = instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_saddle(spec, 1e-9));
}
BENCHMARK(BM_SolveSaddle)->Arg(6)->Arg(32);

void BM_OpdRun(benchmark::State& state) {
  const ProblemSpec spec = instance(state);
  const SaddleSolution sol = solve_saddle(spec);
  OPDConfig cfg = recommended_stepsizes(spec);
  cfg.max_iters = 200;
  for (auto _ : state) benchmark::DoNotOptimize(opd_run(spec, cfg, &sol));
}
BENCHMARK(BM_OpdRun)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
