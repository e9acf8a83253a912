// Copyright 2026 The wptmec Authors
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


// Serial reference against the OpenMP kernels: binary-offloading
// enumeration and a Monte-Carlo sweep.

#include <benchmark/benchmark.h>

#include <vector>

#include "wptmec/baselines.hpp"
#include "wptmec/channel.hpp"
#include "wptmec/config.hpp"
#include "wptmec/harness.hpp"
#include "wptmec/sweep.hpp"

namespace {

using wptmec::Execution;

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_BinaryEnumeration(benchmark::State& state) {
  const int k = static_cast<int>(state.range(1));
  const wptmec::SystemParams params = wptmec::SystemParams::defaults(k);
  const wptmec::NetworkLayout layout = wptmec::generate_layout(params, 7);
  const wptmec::CellChannel cell = wptmec::generate_channels(layout, params, 11).cell(0);
  const std::vector<wptmec::UserRequest> requests(static_cast<size_t>(k), {3e4, 0.5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        wptmec::binary_offloading(cell.links, requests, params, {}, execution_of(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_BinaryEnumeration)
    ->ArgsProduct({{0, 1}, {4, 6}})
    ->ArgNames({"parallel", "K"})
    ->Unit(benchmark::kMillisecond);

void BM_MonteCarloSweep(benchmark::State& state) {
  wptmec::ExperimentConfig config;
  config.realizations = static_cast<int>(state.range(1));
  config.sweep = wptmec::SweepSpec{wptmec::SweepAxis::kData, {1e4, 3e4}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wptmec::run_sweep(config, execution_of(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_MonteCarloSweep)
    ->ArgsProduct({{0, 1}, {4}})
    ->ArgNames({"parallel", "realizations"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
