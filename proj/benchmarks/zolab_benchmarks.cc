// Copyright 2026 The zolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <vector>

#include "benchmark/benchmark.h"
#include "zolab/bench/dataset.h"
#include "zolab/deriv_optimizer.h"
#include "zolab/ledger.h"
#include "zolab/memory_model.h"
#include "zolab/model.h"
#include "zolab/transformer.h"
#include "zolab/zo_optimizer.h"

namespace zolab {
namespace {

ModelConfig Toy() { return FindPreset("toy").config; }

Batch ToyBatch(const ModelConfig& c, int64_t batch_size) {
  static const bench::Dataset data = bench::GenerateDataset(
      bench::TaskKind::kMarkerDetect, 512, c.vocab_size, c.seq_len, 1);
  return bench::BatchSampler(data, batch_size, 1).Next();
}

void BM_Perturb(benchmark::State& state) {
  AllocationLedger ledger;
  TrackedBuffer<float> params(ledger, Category::kWeights, state.range(0));
  SeedReplayPerturber<float> perturber(ledger);
  uint64_t seed = 0;
  for (auto _ : state) {
    perturber.Perturb(params.span(), ProbeSeed{++seed}, 1e-3f);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Perturb)->Arg(1 << 14)->Arg(1 << 20);

void BM_ForwardLoss(benchmark::State& state) {
  AllocationLedger ledger;
  const ModelConfig c = Toy();
  const auto params = InitModel<float>(c, 1, ledger);
  const Batch batch = ToyBatch(c, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardLoss(params, batch, ledger));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardLoss)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Backward(benchmark::State& state) {
  AllocationLedger ledger;
  const ModelConfig c = Toy();
  const auto params = InitModel<float>(c, 1, ledger);
  const Batch batch = ToyBatch(c, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Backward(params, batch, ledger).loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Backward)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ZoStep(benchmark::State& state) {
  AllocationLedger ledger;
  const ModelConfig c = Toy();
  auto params = InitModel<float>(c, 1, ledger);
  const Batch batch = ToyBatch(c, 8);
  ZoConfig config;
  config.probes = state.range(0);
  config.parallel = state.range(1) != 0;
  ZoOptimizer<float> opt(config, ledger);
  const Objective<float> loss = [&](std::span<const float> p) {
    return ForwardLoss<float>(params.layout(), p, batch, ledger);
  };
  int64_t step = 0;
  for (auto _ : state) opt.Step(params.values(), loss, ++step);
}
BENCHMARK(BM_ZoStep)
    ->Args({1, 0})
    ->Args({4, 0})
    ->Args({4, 1})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_AdamStep(benchmark::State& state) {
  AllocationLedger ledger;
  const size_t n = state.range(0);
  TrackedBuffer<float> params(ledger, Category::kWeights, n);
  std::vector<float> grad(n, 1e-3f);
  AdamState<float> adam(ledger, n);
  for (auto _ : state) {
    AdamStep<float>(adam, params.span(), grad, AdamConfig{});
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_AdamStep)->Arg(1 << 20);

void BM_LedgerAcquireRelease(benchmark::State& state) {
  AllocationLedger ledger;
  for (auto _ : state) {
    Allocation a = ledger.Acquire(Category::kActivation, 4096);
    benchmark::DoNotOptimize(a.bytes());
  }
}
BENCHMARK(BM_LedgerAcquireRelease);

}  // namespace
}  // namespace zolab

BENCHMARK_MAIN();
