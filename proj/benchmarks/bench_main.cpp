// Copyright 2026 The qmd Authors
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

#include <benchmark/benchmark.h>

#include <cmath>

#include "qmd/ihe.hpp"
#include "qmd/matrixcore.hpp"
#include "qmd/pathtools.hpp"
#include "qmd/szilard.hpp"

using namespace qmd;

static void BM_PartitionFunction(benchmark::State& state) {
  szilard::WellConfig cfg;
  cfg.n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(szilard::partition_function(0.6, 1.0, cfg));
  }
}
BENCHMARK(BM_PartitionFunction)->Arg(50)->Arg(200);

static void BM_CycleReport(benchmark::State& state) {
  const szilard::WellConfig cfg;
  const szilard::DemonState demon = szilard::thermal_demon(cfg, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(szilard::cycle_report_at(cfg, demon, 0.05));
  }
}
BENCHMARK(BM_CycleReport);

static void BM_CriticalProbability(benchmark::State& state) {
  const szilard::WellConfig cfg;
  const szilard::DemonState demon = szilard::thermal_demon(cfg, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(szilard::critical_probability(cfg, demon));
  }
}
BENCHMARK(BM_CriticalProbability);

static void BM_OracleRunCycle(benchmark::State& state) {
  szilard::WellConfig cfg;
  cfg.insertion_point = 0.42;
  cfg.n_max = static_cast<int>(state.range(0));
  const szilard::DemonState demon = szilard::thermal_demon(cfg, 0.8, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(szilard::oracle_run_cycle(cfg, demon, 0.5, 0.45));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OracleRunCycle)->Arg(10)->Arg(25)->Arg(50)->Complexity();

static void BM_HermitianEigenvalues(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(1);
  ComplexMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.complex_gaussian();
  ComplexMatrix m = a * a.adjoint();
  m /= m.trace().real();
  const DensityMatrix rho = DensityMatrix::unchecked(std::move(m));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitian_eigenvalues(rho));
  }
}
BENCHMARK(BM_HermitianEigenvalues)->Arg(8)->Arg(16)->Arg(64);

static void BM_HaarUnitary(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(haar_unitary(dim, rng));
  }
}
BENCHMARK(BM_HaarUnitary)->Arg(4)->Arg(8)->Arg(16);

static void BM_IheTrial(benchmark::State& state) {
  ihe::IheConfig cfg;
  cfg.dim_reservoir = static_cast<int>(state.range(0));
  std::uint64_t trial = 0;
  const RngStream base(3);
  for (auto _ : state) {
    RngStream sub = base.substream(trial++);
    benchmark::DoNotOptimize(ihe::run_protocol(cfg, ihe::sample_protocol(cfg, sub)));
  }
}
BENCHMARK(BM_IheTrial)->Arg(2)->Arg(4);

static void BM_PathReport(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  path::PathSchedule s;
  s.temperature = 1.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const double gap = 1.0 + 0.8 * t;
    const double excited = 0.2 + 0.3 * std::sin(1.1 * t);
    s.nodes.push_back({{0.0, gap}, {1.0 - excited, excited}});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(path::path_report(s));
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_PathReport)->Arg(100)->Arg(1000)->Complexity();

BENCHMARK_MAIN();
