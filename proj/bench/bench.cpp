// Copyright 2026 The dynmatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "dynmatch/data.hpp"
#include "dynmatch/matching.hpp"
#include "dynmatch/potentials.hpp"
#include "dynmatch/sim.hpp"

namespace dynmatch {
namespace {

Instance year(int affiliates, int64_t refugees) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = affiliates;
  cfg.total_refugees = refugees;
  cfg.seed = 1;
  return data::generate(cfg);
}

// One trajectory LP with range(0) cases on 20 affiliates. The dense
// reference simplex only runs at small sizes.
void BM_TrajectoryPrices(benchmark::State& state, potentials::Backend backend) {
  const Instance inst = year(20, 4000);
  std::vector<const Case*> cases;
  for (int64_t i = 0; i < state.range(0); ++i) {
    cases.push_back(&inst.cases[static_cast<size_t>(i) % inst.cases.size()]);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(potentials::trajectory_prices(
        inst.final_caps, cases, lp::Extremality::kMaximal, backend));
  }
}
BENCHMARK_CAPTURE(BM_TrajectoryPrices, transport, potentials::Backend::kTransport)
    ->Arg(25)->Arg(100)->Arg(400)->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrajectoryPrices, simplex, potentials::Backend::kSimplex)
    ->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

// Pot2 with k = 9 and 1500 future cases.
void BM_Pot2(benchmark::State& state, potentials::Execution execution) {
  const Instance inst = year(20, 4000);
  const BatchRange b = inst.batches().front();
  const std::span<const Case> batch(inst.cases.data() + b.begin, b.size());
  const potentials::SamplingWindow window(inst.history_pool, 0, 182, 30);
  potentials::TrajectoryConfig cfg;
  cfg.k = 9;
  cfg.execution = execution;
  uint64_t computation = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(potentials::pot2(inst.final_caps, batch, window,
                                              1500, cfg, computation++));
  }
}
BENCHMARK_CAPTURE(BM_Pot2, serial, potentials::Execution::kSerial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Pot2, parallel, potentials::Execution::kParallel)
    ->Unit(benchmark::kMillisecond);

void BM_BatchIlp(benchmark::State& state) {
  const Instance inst = year(20, 1000);
  std::vector<Case> batch(inst.cases.begin(),
                          inst.cases.begin() + state.range(0));
  CapacityProfile caps = inst.final_caps;
  for (size_t l = 0; l + 1 < caps.size(); ++l) {
    caps.set(l, Capacity::Finite(caps[l].value() / 20));  // late-year scarcity
  }
  std::vector<double> p(caps.size(), 0.05);
  p.back() = 0.0;
  IlpOptions opt;
  opt.potentials = p;
  opt.epsilon_matched = default_epsilon(1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ilp(batch, caps, inst.sink_index(), opt));
  }
}
BENCHMARK(BM_BatchIlp)->Arg(5)->Arg(14)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_HindsightYear(benchmark::State& state) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = 12;
  cfg.total_refugees = 980;
  cfg.seed = 2;
  const Instance inst = data::generate(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hindsight_optimum(inst, inst.final_caps));
  }
}
BENCHMARK(BM_HindsightYear)->Unit(benchmark::kMillisecond);

void BM_ReplayPot2(benchmark::State& state) {
  data::GeneratorConfig cfg;
  cfg.num_affiliates = 12;
  cfg.total_refugees = 980;
  cfg.seed = 3;
  const Instance inst = data::generate(cfg);
  sim::ReplayConfig rc;
  rc.policy.method = potentials::Method::kPot2;
  rc.policy.k = 5;
  for (auto _ : state) benchmark::DoNotOptimize(sim::replay(inst, rc, 1.0));
}
BENCHMARK(BM_ReplayPot2)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dynmatch

BENCHMARK_MAIN();
