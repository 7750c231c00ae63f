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

#ifndef FMOO_FEDERATION_H_
#define FMOO_FEDERATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmoo/config.h"
#include "fmoo/minnorm.h"
#include "fmoo/problem.h"
#include "fmoo/types.h"

namespace fmoo::federation {

// Divergence guard on the global iterate.
inline constexpr double kDivergenceRadius = 1e8;

// What one client sends back after its K local steps.
struct ClientRoundOutput {
  std::size_t client = 0;
  std::vector<std::size_t> objectives;  // S_i, ascending
  std::vector<Vector> deltas;           // accumulated gradient sums, aligned with objectives
  std::vector<double> drift;            // ||x^{t,K}_{s,i} - x_t||
};

// Full-gradient local phase: one local iterate per owned objective, each started
// at x_t; returns the unscaled sum of the K gradients along the way.
// Throws DivergenceError carrying (round, client, objective, step).
ClientRoundOutput ClientUpdateFull(const Problem& problem, const ModelPoint& x_t,
                                   std::size_t client, std::size_t local_steps,
                                   double eta_local, long round = 0);

// Stochastic local phase. Each step draws `batch` shard indices with
// replacement from ClientStream(seed, client, round, step, lane), where
// lane is 0 under per-client sharing and 1 + s under per-objective
// sampling. batch == 0 or batch >= shard size uses the exact shard gradient.
ClientRoundOutput ClientUpdateStochastic(const Problem& problem, const ModelPoint& x_t,
                                         std::size_t client, std::size_t local_steps,
                                         double eta_local, std::size_t batch,
                                         SampleSharing sharing, std::uint64_t seed,
                                         long round);

// Delta_s = average over R_s of the clients' Delta_{s,i}, summed in
// ascending client order, then divided by K if requested.
// Throws ConfigError if a client output is missing or misaligned.
DirectionSet ServerAggregate(const std::vector<ClientRoundOutput>& outputs,
                             const Problem& problem, std::size_t local_steps,
                             bool normalize_by_k);

struct EngineOptions {
  std::size_t jobs = 1;  // client-update threads per round
  bool compute_lambda_drift = true;
};

struct RoundResult {
  ModelPoint next;
  RoundRecord record;
  minnorm::Solution solution;
};

// One communication round: all clients, aggregation, QP, global step.
// Metrics in the record are evaluated at x_t.
RoundResult RunRound(const ModelPoint& x_t, long t, const ExperimentConfig& config,
                     const Problem& problem, const EngineOptions& options = {});

enum class RunStatus { kCompleted, kDiverged };

struct TrajectoryLog {
  std::vector<RoundRecord> rounds;
  ModelPoint final_point;
  std::optional<ModelPoint> weighted_output;
  std::optional<long> weighted_output_round;
  ExperimentConfig config;
  RunStatus status = RunStatus::kCompleted;
  std::string message;
};

// T rounds from the configured initial point. Divergence stops the run and
// returns the rounds completed so far with status kDiverged.
TrajectoryLog RunExperiment(const ExperimentConfig& config, const Problem& problem,
                            const EngineOptions& options = {});

ModelPoint InitialPoint(const ExperimentConfig& config);

}  // namespace fmoo::federation

#endif  // FMOO_FEDERATION_H_
