// Copyright 2026 The Sculpt Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "sculpt/regularizer.hpp"
#include "sculpt/retention.hpp"
#include "sculpt/theory.hpp"
#include "sculpt/trainer.hpp"

namespace {

using namespace sculpt;

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(1);
  const Matrix x = sample_gaussian(rng, n, n, 1.0), y = sample_gaussian(rng, n, n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_ProductPattern(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SparsitySpec spec;
  spec.p = n;
  spec.q = n;
  spec.r = 8;
  RandomStream rng(2);
  const auto [mb, ma] = sample_mask_pair(rng, spec);
  for (auto _ : state) benchmark::DoNotOptimize(product_pattern_sparsity(mb, ma));
}
BENCHMARK(BM_ProductPattern)->Arg(256)->Arg(2048);

void BM_MonteCarloTrial(benchmark::State& state) {
  SparsitySpec spec;
  spec.p = 256;
  spec.q = 256;
  spec.r = 16;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_validate(seed++, spec, 1, 0.1, 1));
}
BENCHMARK(BM_MonteCarloTrial);

void BM_CmrFrobeniusGrad(benchmark::State& state) {
  RandomStream rng(3);
  const RetentionMask mask = retention_mask(sample_gaussian(rng, 64, 64, 1.0));
  LoraAdapter ad;
  ad.b = sample_gaussian(rng, 64, 8, 1.0);
  ad.a = sample_gaussian(rng, 8, 64, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(cmr_frobenius_grad(mask, ad));
}
BENCHMARK(BM_CmrFrobeniusGrad);

void BM_FineTune(benchmark::State& state) {
  TaskOptions to;
  const TaskSpec task = make_tasks(to);
  PretrainOptions po;
  po.steps = 200;
  const ToyModel base = pretrain_base(0, task, Architecture{}, po);
  TrainConfig cfg;
  cfg.total_steps = static_cast<std::size_t>(state.range(0));
  cfg.warmup_steps = default_warmup(cfg.total_steps);
  for (auto _ : state) benchmark::DoNotOptimize(train(base, task, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FineTune)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
