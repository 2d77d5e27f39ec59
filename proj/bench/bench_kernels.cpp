// Copyright 2026 The cpsgame Authors
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

// Serial reference versus OpenMP for each kernel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cps/benefit.hpp"
#include "cps/coalitional.hpp"
#include "cps/kernels.hpp"

namespace {

cps::CpsParams params(int n) {
  cps::CpsParams p;
  p.n_peers = n;
  p.benefit = cps::log_benefit();
  p.kappa = 0.3;
  p.delta = 0.0025;
  p.sigma = 0.01;
  return p;
}

template <auto Sweep>
void BM_Sweep(benchmark::State& state) {
  const auto p = params(1);
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Sweep(p, 1, n_max));
}

template <auto Argmax>
void BM_GridArgmax(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const cps::kernels::GridAxis axis{0.0, 10.0, points};
  const cps::kernels::Objective2 obj = [](double a, double b) {
    return std::log1p(a + b) - 0.3 * a - 0.01 * a * b;
  };
  for (auto _ : state) benchmark::DoNotOptimize(Argmax(obj, axis, axis));
}

template <auto Blocking>
void BM_Blocking(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto game = cps::coalition_game(params(n));
  // The Shapley value is in the core, so every coalition is scanned.
  const std::vector<double> payoff = cps::shapley(params(n));
  for (auto _ : state) benchmark::DoNotOptimize(Blocking(game, payoff, 1e-9));
}

template <auto Shapley>
void BM_Shapley(benchmark::State& state) {
  const auto game = cps::coalition_game(params(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(Shapley(game));
}

namespace k = cps::kernels;

BENCHMARK(BM_Sweep<&k::serial::sweep>)->Arg(100)->Arg(1000);
BENCHMARK(BM_Sweep<&k::omp::sweep>)->Arg(100)->Arg(1000);
BENCHMARK(BM_GridArgmax<&k::serial::grid_argmax>)->Arg(200)->Arg(800);
BENCHMARK(BM_GridArgmax<&k::omp::grid_argmax>)->Arg(200)->Arg(800);
BENCHMARK(BM_Blocking<&k::serial::first_blocking_coalition>)->Arg(12)->Arg(18);
BENCHMARK(BM_Blocking<&k::omp::first_blocking_coalition>)->Arg(12)->Arg(18);
BENCHMARK(BM_Shapley<&k::serial::shapley_by_permutation>)->Arg(8)->Arg(9);
BENCHMARK(BM_Shapley<&k::omp::shapley_by_permutation>)->Arg(8)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
