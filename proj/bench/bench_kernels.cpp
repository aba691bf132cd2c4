/*
 * Copyright (C) 2026 The speclab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference vs OpenMP kernels. Arg 0 selects Exec::serial, 1 Exec::parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "speclab/freeprob.hpp"
#include "speclab/maxent.hpp"
#include "speclab/sampler.hpp"
#include "speclab/stieltjes.hpp"

using namespace speclab;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_SampleEdges(benchmark::State& state) {
  const auto k = Kernel::product({0.2, 1.0, 0.5});
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sample_adjacency(k, n, inv_sqrt_eps(n), 17, mode(state)));
  label(state);
}
BENCHMARK(BM_SampleEdges)->ArgsProduct({{0, 1}, {2000, 8000}})->Unit(benchmark::kMillisecond);

void BM_MuMoments(benchmark::State& state) {
  const auto kg = discretize(Kernel::product({0.2, 1.0, 0.5}), 128);
  for (auto _ : state) benchmark::DoNotOptimize(mu_moments(kg, static_cast<int>(state.range(1)), mode(state)));
  label(state);
}
BENCHMARK(BM_MuMoments)->ArgsProduct({{0, 1}, {8, 12}})->Unit(benchmark::kMillisecond);

void BM_NuMoments(benchmark::State& state) {
  const auto kg = discretize(Kernel::product({0.2, 1.0, 0.5}), 64);
  for (auto _ : state) benchmark::DoNotOptimize(nu_moments(kg, static_cast<int>(state.range(1)), mode(state)));
  label(state);
}
BENCHMARK(BM_NuMoments)->ArgsProduct({{0, 1}, {6, 8}})->Unit(benchmark::kMillisecond);

void BM_DensityProfile(benchmark::State& state) {
  const auto kg = discretize(Kernel::product({0.2, 1.0, 0.5}), 200);
  std::vector<double> energies;
  for (int s = 0; s <= 40; ++s) energies.push_back(-2.0 + 0.1 * s);
  SolverOptions opts;
  opts.tol = 1e-10;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(density_profile(kg, energies, 1e-2, opts));
  label(state);
}
BENCHMARK(BM_DensityProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveMultipliers(benchmark::State& state) {
  std::vector<double> k(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::floor(std::cbrt(static_cast<double>(i + 1)));
  MaxentOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_multipliers(k, opts));
  label(state);
}
BENCHMARK(BM_SolveMultipliers)->ArgsProduct({{0, 1}, {2000, 8000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
