// Copyright 2026 The Cellstore Authors
//
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

// Serial reference kernels against their OpenMP versions, plus whole
// hypercube evaluations in both modes on a synthetic gas.

#include <benchmark/benchmark.h>

#include <memory>
#include <numeric>
#include <random>

#include "cellstore/hypercube.hpp"
#include "cellstore/kernels.hpp"
#include "workload.hpp"

using namespace cellstore;

namespace {

std::vector<std::uint32_t> random_values(std::size_t n) {
  std::mt19937 rng(11);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = rng();
  return v;
}

kernels::ExecMode mode_of(const benchmark::State& state) {
  return state.range(1) ? kernels::ExecMode::Parallel : kernels::ExecMode::Serial;
}

void BM_Scan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto values = random_values(n);
  const auto mode = mode_of(state);
  for (auto _ : state) {
    auto out = kernels::scan(mode, static_cast<kernels::SlotId>(n), [&](kernels::SlotId i) { return values[i] % 7 == 0; });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_Filter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto values = random_values(n);
  std::vector<kernels::SlotId> ids(n);
  std::iota(ids.begin(), ids.end(), 0U);
  const auto mode = mode_of(state);
  for (auto _ : state) {
    auto out = kernels::filter(mode, std::span<const kernels::SlotId>(ids), [&](kernels::SlotId i) { return values[i] & 1U; });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_Intersect(benchmark::State& state) {
  const auto small = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint32_t> big(1'000'000);
  std::iota(big.begin(), big.end(), 0U);
  std::vector<std::uint32_t> few;
  for (std::size_t i = 0; i < small; ++i) few.push_back(static_cast<std::uint32_t>(i * (big.size() / small)));
  for (auto _ : state) {
    auto out = kernels::intersect_sorted<std::uint32_t>(few, big);
    benchmark::DoNotOptimize(out.data());
  }
}

const CellGas& shared_gas() {
  static const CellGas gas = workload::build_gas({.cells = 1'000'000});
  return gas;
}

void BM_EvaluateHundred(benchmark::State& state) {
  const auto& gas = shared_gas();
  std::mt19937_64 rng(3);
  QueryOptions opts;
  opts.mode = mode_of(state);
  const auto cube = workload::hundred_cube({.cells = 1'000'000}, rng);
  for (auto _ : state) {
    auto cells = evaluate(cube, gas, opts);
    benchmark::DoNotOptimize(cells.data());
  }
}

// No dimension can be probed, so the planner scans every slot.
void BM_EvaluateScan(benchmark::State& state) {
  const auto& gas = shared_gas();
  QueryOptions opts;
  opts.mode = mode_of(state);
  opts.result_cap = 2'000'000;
  Hypercube cube({{"Concept", AnyValue{}, std::nullopt},
                  {"Entity", AnyValue{}, std::nullopt},
                  {"Unit", AnyValue{}, std::nullopt},
                  {"Region", AnyValue{}, AspectValue("[World]")}});
  for (auto _ : state) {
    auto ids = evaluate_ids(cube, gas.snapshot(), opts);
    benchmark::DoNotOptimize(ids.data());
  }
}

}  // namespace

BENCHMARK(BM_Scan)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Filter)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Intersect)->Arg(100)->Arg(10'000);
BENCHMARK(BM_EvaluateHundred)->Args({0, 0})->Args({0, 1})->ArgNames({"", "parallel"});
BENCHMARK(BM_EvaluateScan)->Args({0, 0})->Args({0, 1})->ArgNames({"", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
