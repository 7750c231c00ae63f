// Copyright 2026 The fmoo Authors
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
#include <random>

#include <benchmark/benchmark.h>

#include "fmoo/config.h"
#include "fmoo/federation.h"
#include "fmoo/minnorm.h"
#include "fmoo/problem_factory.h"

namespace {

fmoo::Matrix RandomDirections(std::int64_t s, std::int64_t d) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(s * 1000 + d));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  fmoo::Matrix g(s, d);
  for (std::int64_t r = 0; r < s; ++r) {
    for (std::int64_t c = 0; c < d; ++c) g(r, c) = unit(gen);
  }
  return g;
}

void BM_SolveMinNorm(benchmark::State& state) {
  const auto g = RandomDirections(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fmoo::minnorm::SolveMinNorm(g));
}
BENCHMARK(BM_SolveMinNorm)->ArgsProduct({{2, 4, 8, 16}, {10, 100, 1000}});

void BM_ClosedFormTwo(benchmark::State& state) {
  const auto g = RandomDirections(2, state.range(0));
  const fmoo::Vector a = g.row(0).transpose(), b = g.row(1).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(fmoo::minnorm::ClosedFormTwo(a, b));
}
BENCHMARK(BM_ClosedFormTwo)->Arg(10)->Arg(1000);

fmoo::ExperimentConfig RoundConfig(fmoo::ProblemKind kind, std::size_t clients, bool stochastic) {
  fmoo::ExperimentConfig c;
  c.clients = clients;
  c.objectives = 2;
  c.dimension = 20;
  c.indicator = fmoo::IndicatorMatrix::AllOnes(2, clients);
  c.local_steps = 5;
  c.eta_global = 0.05;
  c.eta_local = 0.01;
  c.problem.kind = kind;
  c.problem.heterogeneity = 1.0;
  if (stochastic) {
    c.mode = fmoo::GradientMode::kStochastic;
    c.batch_size = 16;
  }
  return c;
}

void RunRounds(benchmark::State& state, fmoo::ProblemKind kind, bool stochastic) {
  const auto c = RoundConfig(kind, static_cast<std::size_t>(state.range(0)), stochastic);
  const auto problem = fmoo::MakeProblem(c);
  const fmoo::ModelPoint x = fmoo::federation::InitialPoint(c);
  const fmoo::federation::EngineOptions options{static_cast<std::size_t>(state.range(1)), false};
  long t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmoo::federation::RunRound(x, t++, c, *problem, options));
  }
}

void BM_RoundQuadratic(benchmark::State& state) {
  RunRounds(state, fmoo::ProblemKind::kQuadratic, false);
}
BENCHMARK(BM_RoundQuadratic)->ArgsProduct({{4, 32}, {1, 4}});

void BM_RoundToyStochastic(benchmark::State& state) {
  RunRounds(state, fmoo::ProblemKind::kToyNonconvex, true);
}
BENCHMARK(BM_RoundToyStochastic)->ArgsProduct({{4, 32}, {1, 4}});

void BM_RoundClassification(benchmark::State& state) {
  RunRounds(state, fmoo::ProblemKind::kClassification, false);
}
BENCHMARK(BM_RoundClassification)->ArgsProduct({{10}, {1, 4}});

}  // namespace

BENCHMARK_MAIN();
