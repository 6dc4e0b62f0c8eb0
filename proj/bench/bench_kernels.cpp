// Serial reference vs OpenMP dispatch for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "sattack/attack/engine.hpp"
#include "sattack/data/synthetic.hpp"
#include "sattack/experiments/sensitivity.hpp"
#include "sattack/predictors/constant_velocity.hpp"
#include "sattack/predictors/training.hpp"

using namespace sattack;

namespace {

const std::vector<Scene>& scenes() {
  static const auto s = generate_synthetic(SyntheticTemplate::mixed, 0.02, 32, 7);
  return s;
}

const PoolLiteParams& params() {
  static const auto p = PoolLiteParams::initialize(32, 3);
  return p;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_BatchGradient(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pool_lite_batch_gradient(params(), scenes(), mode(state)).loss);
}
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_AttackPoolLite(benchmark::State& state) {
  const PoolLitePredictor model(params());
  AttackConfig cfg;
  cfg.max_iters = 20;
  const std::span<const Scene> subset(scenes().data(), 8);
  for (auto _ : state) benchmark::DoNotOptimize(attack_dataset(subset, model, cfg, mode(state)).summary.cr);
}
BENCHMARK(BM_AttackPoolLite)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_AttackConstantVelocity(benchmark::State& state) {
  const ConstantVelocityPredictor model;
  AttackConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(attack_dataset(scenes(), model, cfg, mode(state)).summary.cr);
}
BENCHMARK(BM_AttackConstantVelocity)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Sensitivity(benchmark::State& state) {
  const PoolLitePredictor model(params());
  SensitivityConfig cfg;
  cfg.trials = 4;
  for (auto _ : state) benchmark::DoNotOptimize(timestep_sensitivity(model, scenes(), cfg, mode(state)));
}
BENCHMARK(BM_Sensitivity)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
