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

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "fmoo/config.h"
#include "fmoo/errors.h"
#include "fmoo/federation.h"
#include "fmoo/problem.h"
#include "fmoo/problem_factory.h"
#include "fmoo/weighted_output.h"
#include "oracles.h"

namespace fmoo::federation {
namespace {

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double e : v) out[k++] = e;
  return out;
}

// f(x) = (1/2)||x - c||^2 on one client, one objective.
QuadraticProblem SingleQuadratic(const Vector& c, double noise = 0.0) {
  QuadraticSuiteParams p;
  p.dimension = static_cast<std::size_t>(c.size());
  p.centers = {c};
  p.noise = noise;
  p.samples_per_client = 32;
  return QuadraticProblem(IndicatorMatrix::AllOnes(1, 1), p);
}

ExperimentConfig BaseConfig(ProblemKind kind, std::size_t m, std::size_t s, std::size_t d) {
  ExperimentConfig c;
  c.clients = m;
  c.objectives = s;
  c.dimension = d;
  c.rounds = 20;
  c.eta_global = 0.1;
  c.eta_local = 0.05;
  c.local_steps = 3;
  c.seed = 5;
  c.problem.kind = kind;
  c.problem.heterogeneity = 0.5;
  c.problem.noise = 0.5;
  RefreshIndicator(c);
  return c;
}

TEST(ClientUpdateFull, SingleStepIsTheGradient) {
  const auto p = SingleQuadratic(Vec({1, -2, 3}));
  const Vector x = Vec({0.5, 0.5, 0.5});
  const auto out = ClientUpdateFull(p, x, 0, 1, 0.3);
  ASSERT_EQ(out.deltas.size(), 1u);
  EXPECT_EQ(out.deltas[0], p.LocalGradient(0, 0, x));
  EXPECT_EQ(out.objectives, (std::vector<std::size_t>{0}));
}

TEST(ClientUpdateFull, ZeroLocalRateRepeatsTheGradient) {
  const auto p = SingleQuadratic(Vec({1, 2}));
  const Vector x = Vec({-1, 4});
  const auto out = ClientUpdateFull(p, x, 0, 7, 0.0);
  EXPECT_EQ(out.deltas[0], 7.0 * p.LocalGradient(0, 0, x));
  EXPECT_EQ(out.drift[0], 0.0);
}

TEST(ClientUpdateFull, TwoStepHandRecursion) {
  const Vector c = Vec({2, -1});
  const auto p = SingleQuadratic(c);
  const auto out = ClientUpdateFull(p, Vector::Zero(2), 0, 2, 0.1);
  EXPECT_NEAR((out.deltas[0] - (-1.9 * c)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(out.drift[0], (0.1 * c + 0.1 * 0.9 * c).norm(), 1e-15);
}

TEST(ClientUpdateFull, SeparateIteratePerObjective) {
  QuadraticSuiteParams qp;
  qp.dimension = 2;
  qp.centers = {Vec({1, 0}), Vec({0, 1})};
  const QuadraticProblem p(IndicatorMatrix::AllOnes(2, 1), qp);
  const auto out = ClientUpdateFull(p, Vector::Zero(2), 0, 2, 0.5);
  // Each objective walks towards its own centre: gradients -c, then -0.5c.
  EXPECT_NEAR((out.deltas[0] - Vec({-1.5, 0})).norm(), 0.0, 1e-15);
  EXPECT_NEAR((out.deltas[1] - Vec({0, -1.5})).norm(), 0.0, 1e-15);
}

TEST(ClientUpdateFull, DivergenceCarriesContext) {
  const auto p = SingleQuadratic(Vec({1, 1}));
  try {
    ClientUpdateFull(p, Vec({2, 2}), 0, 400, 10.0, 7);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.round(), 7);
    EXPECT_EQ(e.client(), 0);
    EXPECT_EQ(e.objective(), 0);
    EXPECT_GE(e.step(), 1);
  }
}

TEST(ClientUpdateStochastic, FullShardMatchesFullUpdate) {
  const auto p = SingleQuadratic(Vec({1, -1, 0.5}), 0.8);
  const Vector x = Vec({0.1, 0.2, 0.3});
  const auto full = ClientUpdateFull(p, x, 0, 4, 0.1, 3);
  for (std::size_t batch : {std::size_t{0}, p.ShardSize(0)}) {
    const auto stoch =
        ClientUpdateStochastic(p, x, 0, 4, 0.1, batch, SampleSharing::kPerClient, 11, 3);
    EXPECT_EQ(stoch.deltas[0], full.deltas[0]);
  }
}

TEST(ClientUpdateStochastic, SameStreamsSameOutput) {
  const auto c = BaseConfig(ProblemKind::kToyNonconvex, 3, 2, 4);
  const auto p = MakeProblem(c);
  const Vector x = Vec({0.3, -0.2, 1, 0});
  for (auto sharing : {SampleSharing::kPerClient, SampleSharing::kPerObjective}) {
    const auto a = ClientUpdateStochastic(*p, x, 1, 3, 0.1, 8, sharing, 42, 9);
    const auto b = ClientUpdateStochastic(*p, x, 1, 3, 0.1, 8, sharing, 42, 9);
    EXPECT_EQ(a.deltas[0], b.deltas[0]);
    EXPECT_EQ(a.deltas[1], b.deltas[1]);
    const auto other = ClientUpdateStochastic(*p, x, 1, 3, 0.1, 8, sharing, 42, 10);
    EXPECT_NE(a.deltas[0], other.deltas[0]);
  }
}

TEST(ClientUpdateStochastic, SharingModesDrawDifferentSamples) {
  // With identical objectives, per-client sharing gives identical deltas
  // while per-objective sampling does not.
  QuadraticSuiteParams qp;
  qp.dimension = 3;
  qp.centers = {Vec({1, 1, 1}), Vec({1, 1, 1})};
  qp.noise = 1.0;
  const QuadraticProblem p(IndicatorMatrix::AllOnes(2, 1), qp);
  const Vector x = Vector::Zero(3);
  const auto shared = ClientUpdateStochastic(p, x, 0, 2, 0.1, 4, SampleSharing::kPerClient, 1, 1);
  EXPECT_EQ(shared.deltas[0], shared.deltas[1]);
  const auto split =
      ClientUpdateStochastic(p, x, 0, 2, 0.1, 4, SampleSharing::kPerObjective, 1, 1);
  EXPECT_NE(split.deltas[0], split.deltas[1]);
}

TEST(ClientUpdateStochastic, SingleStepIsUnbiased) {
  const auto c = BaseConfig(ProblemKind::kClassification, 2, 2, 4);
  const auto p = MakeProblem(c);
  const Vector x = Vec({0.5, -0.5, 0.25, 0});
  const int n = 10000;
  Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
  for (int r = 0; r < n; ++r) {
    const auto out =
        ClientUpdateStochastic(*p, x, 0, 1, 0.1, 4, SampleSharing::kPerClient, 3, r + 1);
    sum += out.deltas[1];
    sum_sq += out.deltas[1].cwiseProduct(out.deltas[1]);
  }
  const Vector mean = sum / n;
  const Vector se = ((sum_sq / n - mean.cwiseProduct(mean)) / (n - 1.0)).cwiseSqrt();
  const Vector exact = p->LocalGradient(1, 0, x);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_LE(std::abs(mean[j] - exact[j]), 3 * se[j]);
}

TEST(ServerAggregate, AveragesOverOwnersAndNormalises) {
  QuadraticSuiteParams qp;
  qp.dimension = 2;
  qp.centers = {Vec({1, 0}), Vec({0, 1})};
  const QuadraticProblem p(IndicatorMatrix({{1, 1, 0}, {0, 1, 1}}), qp);
  std::vector<ClientRoundOutput> outs(3);
  outs[0] = {0, {0}, {Vec({2, 0})}, {0}};
  outs[1] = {1, {0, 1}, {Vec({4, 0}), Vec({0, 6})}, {0, 0}};
  outs[2] = {2, {1}, {Vec({0, 2})}, {0}};
  const auto raw = ServerAggregate(outs, p, 2, false);
  EXPECT_EQ(Vector(raw.rows.row(0).transpose()), Vec({3, 0}));
  EXPECT_EQ(Vector(raw.rows.row(1).transpose()), Vec({0, 4}));
  const auto norm = ServerAggregate(outs, p, 2, true);
  EXPECT_EQ(Vector(norm.rows.row(0).transpose()), Vec({1.5, 0}));

  outs.pop_back();
  EXPECT_THROW(ServerAggregate(outs, p, 2, true), ConfigError);
}

TEST(ServerAggregate, IdenticalClientsGiveTheSingleClientDelta) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 4, 2, 3);
  c.problem.heterogeneity = 0.0;
  c.problem.noise = 0.0;
  const auto p = MakeProblem(c);
  const Vector x = Vec({1, 2, 3});
  std::vector<ClientRoundOutput> outs;
  for (std::size_t i = 0; i < 4; ++i) outs.push_back(ClientUpdateFull(*p, x, i, 3, 0.1));
  const auto agg = ServerAggregate(outs, *p, 3, true);
  for (std::size_t s = 0; s < 2; ++s) {
    const Vector expect = outs[0].deltas[s] / 3.0;
    EXPECT_NEAR((agg.rows.row(static_cast<Eigen::Index>(s)).transpose() - expect).norm(), 0.0,
                1e-14);
  }
}

TEST(ServerAggregate, KOneNormalisedIsTheGlobalGradient) {
  const auto c = BaseConfig(ProblemKind::kToyNonconvex, 3, 2, 4);
  const auto p = MakeProblem(c);
  const Vector x = Vec({0.1, 0.2, -0.3, 0.4});
  std::vector<ClientRoundOutput> outs;
  for (std::size_t i = 0; i < 3; ++i) outs.push_back(ClientUpdateFull(*p, x, i, 1, 0.1));
  const auto agg = ServerAggregate(outs, *p, 1, true);
  EXPECT_EQ(agg.rows, p->Gradients(x).rows);
}

TEST(ServerAggregate, ClientWeightsGiveWeightedAverage) {
  QuadraticSuiteParams qp;
  qp.dimension = 1;
  qp.centers = {Vec({0})};
  const QuadraticProblem p(IndicatorMatrix::AllOnes(1, 2), qp, {1.0, 3.0});
  std::vector<ClientRoundOutput> outs = {{0, {0}, {Vec({4})}, {0}}, {1, {0}, {Vec({8})}, {0}}};
  EXPECT_DOUBLE_EQ(ServerAggregate(outs, p, 1, true).rows(0, 0), 7.0);
}

TEST(RunRound, SymmetricQuadraticLandsInOneRound) {
  ExperimentConfig c;
  c.clients = 1;
  c.objectives = 2;
  c.dimension = 2;
  c.eta_global = 1.0;
  c.rounds = 2;
  c.problem.centers = {{1, 0}, {0, 1}};
  c.problem.noise = 0.0;
  RefreshIndicator(c);
  const auto p = MakeProblem(c);
  const auto first = RunRound(Vector::Zero(2), 1, c, *p);
  EXPECT_NEAR(first.next[0], 0.5, 1e-12);
  const auto second = RunRound(first.next, 2, c, *p);
  EXPECT_LE(second.record.dbar_norm_sq, 1e-20);
  EXPECT_NEAR(*first.record.delta_q, 0.25, 1e-12);
}

TEST(RunRound, SingleObjectiveIsAveragedLocalSgd) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 3, 1, 3);
  c.normalize_delta_by_k = false;
  const auto p = MakeProblem(c);
  const Vector x = Vec({1, -1, 2});
  const auto r = RunRound(x, 1, c, *p);
  EXPECT_EQ(r.record.lambda[0], 1.0);
  Vector avg_local = Vector::Zero(3);
  for (std::size_t i = 0; i < 3; ++i) {
    Vector xi = x;
    for (std::size_t k = 0; k < c.local_steps; ++k) xi -= c.eta_local * p->LocalGradient(0, i, xi);
    avg_local += xi / 3.0;
  }
  // One server step with eta_global = eta_local reproduces FedAvg on the
  // local iterates.
  auto fedavg = c;
  fedavg.eta_global = c.eta_local;
  const auto step = RunRound(x, 1, fedavg, *p);
  EXPECT_NEAR((step.next - avg_local).norm(), 0.0, 1e-14);
}

TEST(RunRound, ZeroGlobalStepLeavesThePointAlone) {
  // A config file cannot ask for this (eta_global > 0 is validated), but the
  // round itself is well defined.
  auto c = BaseConfig(ProblemKind::kQuadratic, 2, 2, 3);
  c.eta_global = 0.0;
  const auto p = MakeProblem(c);
  const Vector x = Vec({1, 2, 3});
  const auto r = RunRound(x, 1, c, *p);
  EXPECT_EQ(r.next, x);
  EXPECT_EQ(p->Losses(r.next), p->Losses(x));
}

TEST(RunRound, SerialAndParallelAreBitIdentical) {
  for (auto mode : {GradientMode::kFull, GradientMode::kStochastic}) {
    auto c = BaseConfig(ProblemKind::kToyNonconvex, 5, 3, 4);
    c.mode = mode;
    c.batch_size = 8;
    const auto p = MakeProblem(c);
    const Vector x = Vec({0.5, 1, -1, 0});
    EngineOptions serial, parallel;
    parallel.jobs = 4;
    const auto a = RunRound(x, 3, c, *p, serial);
    const auto b = RunRound(x, 3, c, *p, parallel);
    EXPECT_EQ(a.next, b.next);
    EXPECT_EQ(a.record.lambda.values(), b.record.lambda.values());
  }
}

TEST(RunExperiment, OneRoundGivesOneRecord) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 2, 2, 3);
  c.rounds = 1;
  const auto p = MakeProblem(c);
  const auto log = RunExperiment(c, *p);
  ASSERT_EQ(log.rounds.size(), 1u);
  EXPECT_EQ(log.rounds[0].t, 1);
  EXPECT_EQ(log.status, RunStatus::kCompleted);
}

TEST(RunExperiment, RecordsAreConsistent) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 3, 2, 4);
  c.mode = GradientMode::kStochastic;
  c.batch_size = 4;
  c.snapshot_every = 5;
  const auto p = MakeProblem(c);
  const auto log = RunExperiment(c, *p);
  ASSERT_EQ(log.rounds.size(), c.rounds);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < log.rounds.size(); ++k) {
    const auto& r = log.rounds[k];
    EXPECT_EQ(r.t, static_cast<long>(k + 1));
    EXPECT_GE(r.d_norm_sq, 0.0);
    EXPECT_GE(r.dbar_norm_sq, 0.0);
    ASSERT_TRUE(r.delta_q.has_value());
    EXPECT_GE(*r.delta_q, 0.0);
    ASSERT_TRUE(r.lambda_drift.has_value());
    EXPECT_GE(*r.lambda_drift, 0.0);
    running = std::min(running, r.dbar_norm_sq);
    EXPECT_EQ(r.running_min_dbar, running);
    EXPECT_EQ(r.x_snapshot.has_value(), k % 5 == 0);
  }
  EXPECT_TRUE(log.weighted_output.has_value());
}

TEST(RunExperiment, InitialPointDefaultsToZero) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 1, 2, 3);
  EXPECT_EQ(InitialPoint(c), Vector::Zero(3));
  c.initial_point = {1, 2, 3};
  EXPECT_EQ(InitialPoint(c), Vec({1, 2, 3}));
}

TEST(RunExperiment, DivergenceKeepsThePartialLog) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 2, 2, 3);
  c.eta_global = 50.0;
  c.local_steps = 1;
  c.rounds = 100;
  c.problem.curvature = 1.0;
  const auto p = MakeProblem(c);
  const auto log = RunExperiment(c, *p);
  EXPECT_EQ(log.status, RunStatus::kDiverged);
  EXPECT_FALSE(log.rounds.empty());
  EXPECT_LT(log.rounds.size(), c.rounds);
  EXPECT_FALSE(log.message.empty());
}

TEST(RunExperiment, RejectsBatchLargerThanShard) {
  auto c = BaseConfig(ProblemKind::kClassification, 10, 2, 4);
  c.mode = GradientMode::kStochastic;
  c.problem.partition = PartitionSkew::kLabelSkew;
  c.problem.samples_per_client = 20;
  c.batch_size = 20;
  const auto p = MakeProblem(c);
  std::size_t smallest = p->ShardSize(0);
  for (std::size_t i = 0; i < 10; ++i) smallest = std::min(smallest, p->ShardSize(i));
  c.batch_size = smallest + 1;
  if (c.batch_size <= 20) EXPECT_THROW(RunExperiment(c, *p), ConfigError);
}

TEST(WeightedOutput, SingleRoundIsCertain) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(PickWeightedIndex(1, 1.0, 0.5,
                                RandomStream(seed, StreamDomain::kOutputSelection, 0, 0, 0, 0)),
              1);
  }
}

void ExpectFrequencies(std::size_t rounds, double mu, double eta) {
  const int draws = 100000;
  std::vector<int> counts(rounds, 0);
  for (int n = 0; n < draws; ++n) {
    const long t = PickWeightedIndex(
        rounds, mu, eta,
        RandomStream(17, StreamDomain::kOutputSelection, 0, 0, static_cast<std::uint32_t>(n), 0));
    ASSERT_GE(t, 1);
    ASSERT_LE(t, static_cast<long>(rounds));
    ++counts[static_cast<std::size_t>(t - 1)];
  }
  const auto p = testing::GeometricWeights(rounds, mu * eta / 2.0);
  for (std::size_t t = 0; t < rounds; ++t) {
    const double freq = counts[t] / static_cast<double>(draws);
    const double se = std::sqrt(p[t] * (1 - p[t]) / draws);
    // 4 SE per cell keeps the family-wise false alarm rate near 1e-3.
    EXPECT_LE(std::abs(freq - p[t]), 4 * se) << "round " << t + 1;
  }
}

TEST(WeightedOutput, HalfRatioGivesPowersOfTwo) {
  const auto p = testing::GeometricWeights(3, 0.5);
  EXPECT_NEAR(p[0], 1.0 / 7, 1e-15);
  EXPECT_NEAR(p[2], 4.0 / 7, 1e-15);
  ExpectFrequencies(3, 1.0, 1.0);
}

TEST(WeightedOutput, TinyRatioIsUniform) { ExpectFrequencies(6, 1e-9, 1e-3); }

TEST(WeightedOutput, LongRunsStayFinite) {
  WeightedOutputSampler sampler(1.0, 1.5, RandomStream(1, StreamDomain::kOutputSelection, 0, 0, 0, 0));
  for (long t = 1; t <= 5000; ++t) sampler.Offer(t, Vector::Constant(1, static_cast<double>(t)));
  ASSERT_TRUE(sampler.selected_round().has_value());
  // Weights grow by 4x per round, so the last rounds dominate.
  EXPECT_GE(*sampler.selected_round(), 4990);
  EXPECT_EQ((*sampler.selected_point())[0], static_cast<double>(*sampler.selected_round()));
}

TEST(WeightedOutput, RejectsInvalidRates) {
  auto rng = RandomStream(1, StreamDomain::kOutputSelection, 0, 0, 0, 0);
  EXPECT_THROW(WeightedOutputSampler(0.0, 0.1, rng), NumericError);
  EXPECT_THROW(WeightedOutputSampler(1.0, 2.0, rng), NumericError);
}

TEST(WeightedOutput, PicksFromSnapshots) {
  auto c = BaseConfig(ProblemKind::kQuadratic, 2, 2, 3);
  c.snapshot_every = 1;
  const auto p = MakeProblem(c);
  const auto log = RunExperiment(c, *p);
  const auto x = PickWeightedOutput(log, 1.0, c.eta_global,
                                    RandomStream(4, StreamDomain::kOutputSelection, 0, 0, 0, 0));
  bool found = false;
  for (const auto& r : log.rounds) found = found || *r.x_snapshot == x;
  EXPECT_TRUE(found);

  auto sparse = c;
  sparse.snapshot_every = 0;
  const auto log2 = RunExperiment(sparse, *p);
  EXPECT_THROW(PickWeightedOutput(log2, 1.0, c.eta_global,
                                  RandomStream(4, StreamDomain::kOutputSelection, 0, 0, 0, 0)),
               NumericError);
}

}  // namespace
}  // namespace fmoo::federation
