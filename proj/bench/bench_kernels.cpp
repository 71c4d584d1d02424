// Copyright 2026 The contest-lab Authors
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "contest/kernels.hpp"
#include "contest/sim.hpp"
#include "contest/solver.hpp"

namespace {

using namespace contest;

struct SweepFixture {
  ContestAutomaton m;
  FlatAutomaton flat;
  SuccessFunctionSpec sf = SuccessFunctionSpec::tullock(0.5);
  std::vector<double> va, vb, out_a, out_b;

  explicit SweepFixture(int margin)
      : m(build_tug_of_war(margin, 0.3)), flat(m), va(m.size()), vb(m.size()),
        out_a(m.size()), out_b(m.size()) {
    for (StateId s = 0; s < m.size(); ++s) {
      const double x = static_cast<double>(s) / static_cast<double>(m.size() - 1);
      va[s] = x;
      vb[s] = 1.0 - x;
    }
  }
};

void BM_SweepSerial(benchmark::State& state) {
  SweepFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bellman_sweep_serial(f.flat, f.sf, 0.5, f.va, f.vb, f.out_a, f.out_b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.m.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  SweepFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bellman_sweep_parallel(f.flat, f.sf, 0.5, f.va, f.vb, f.out_a, f.out_b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.m.size()));
}

BENCHMARK(BM_SweepSerial)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_SweepParallel)->Arg(64)->Arg(1024)->Arg(16384);

template <bool Parallel>
void BM_Simulate(benchmark::State& state) {
  const auto sf = SuccessFunctionSpec::tullock(1.0);
  const ContestSpec spec(build_tug_of_war(4), sf, 1.0);
  const ValueSolution sol = solve_tow_closed(4, 0.0, 0, sf, 1.0);
  SimOptions opts;
  opts.paths = state.range(0);
  for (auto _ : state) {
    auto s = Parallel ? simulate(sol, spec, opts) : simulate_serial(sol, spec, opts);
    benchmark::DoNotOptimize(s.mean_total_effort);
  }
  state.SetItemsProcessed(state.iterations() * opts.paths);
}

BENCHMARK(BM_Simulate<false>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate<true>)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
