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

#include "fmoo/federation.h"

#include <cmath>
#include <algorithm>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "fmoo/errors.h"
#include "fmoo/metrics.h"
#include "fmoo/random.h"
#include "fmoo/weighted_output.h"

namespace fmoo::federation {
namespace {

void CheckLocal(const Vector& v, long round, std::size_t client, std::size_t s, std::size_t k) {
  if (!AllFinite(v)) {
    throw DivergenceError("non-finite local iterate at round " + std::to_string(round) +
                              ", client " + std::to_string(client) + ", objective " +
                              std::to_string(s) + ", step " + std::to_string(k),
                          round, static_cast<long>(client), static_cast<long>(s),
                          static_cast<long>(k));
  }
}

// Shared local loop; `grad(s, k, x)` yields the (stochastic) gradient used
// at step k.
template <typename GradFn>
ClientRoundOutput LocalPhase(const Problem& problem, const ModelPoint& x_t, std::size_t client,
                             std::size_t local_steps, double eta_local, long round,
                             GradFn&& grad) {
  if (local_steps < 1) throw ConfigError("must be >= 1", "local_steps");
  if (!(eta_local >= 0.0)) throw ConfigError("must be >= 0", "eta_local");
  ClientRoundOutput out;
  out.client = client;
  out.objectives = problem.indicator().objectives_of(client);
  const std::size_t owned = out.objectives.size();
  std::vector<Vector> local(owned, x_t);
  out.deltas.resize(owned);
  for (std::size_t k = 0; k < local_steps; ++k) {
    for (std::size_t o = 0; o < owned; ++o) {
      const std::size_t s = out.objectives[o];
      Vector g = grad(s, k, local[o]);
      CheckLocal(g, round, client, s, k);
      local[o] -= eta_local * g;
      CheckLocal(local[o], round, client, s, k);
      if (k == 0) {
        out.deltas[o] = std::move(g);
      } else {
        out.deltas[o] += g;
      }
    }
  }
  for (std::size_t o = 0; o < owned; ++o) out.drift.push_back((local[o] - x_t).norm());
  return out;
}

}  // namespace

ClientRoundOutput ClientUpdateFull(const Problem& problem, const ModelPoint& x_t,
                                   std::size_t client, std::size_t local_steps,
                                   double eta_local, long round) {
  return LocalPhase(problem, x_t, client, local_steps, eta_local, round,
                    [&](std::size_t s, std::size_t, const Vector& x) {
                      return problem.LocalGradient(s, client, x);
                    });
}

ClientRoundOutput ClientUpdateStochastic(const Problem& problem, const ModelPoint& x_t,
                                         std::size_t client, std::size_t local_steps,
                                         double eta_local, std::size_t batch,
                                         SampleSharing sharing, std::uint64_t seed,
                                         long round) {
  const std::size_t shard = problem.ShardSize(client);
  if (batch == 0 || batch >= shard) {
    return ClientUpdateFull(problem, x_t, client, local_steps, eta_local, round);
  }
  std::vector<std::size_t> shared;
  std::size_t shared_step = static_cast<std::size_t>(-1);
  std::vector<std::size_t> own;
  auto draw = [&](std::size_t k, std::size_t lane, std::vector<std::size_t>& idx) {
    RandomStream rng = ClientStream(seed, client, static_cast<std::size_t>(round), k, lane);
    idx.resize(batch);
    for (auto& j : idx) j = rng.UniformIndex(shard);
  };
  return LocalPhase(problem, x_t, client, local_steps, eta_local, round,
                    [&](std::size_t s, std::size_t k, const Vector& x) {
                      if (sharing == SampleSharing::kPerClient) {
                        if (shared_step != k) {
                          draw(k, 0, shared);
                          shared_step = k;
                        }
                        return problem.SampleGradient(s, client, x, shared);
                      }
                      draw(k, 1 + s, own);
                      return problem.SampleGradient(s, client, x, own);
                    });
}

DirectionSet ServerAggregate(const std::vector<ClientRoundOutput>& outputs,
                             const Problem& problem, std::size_t local_steps,
                             bool normalize_by_k) {
  const IndicatorMatrix& a = problem.indicator();
  if (outputs.size() != a.clients()) {
    throw ConfigError("expected " + std::to_string(a.clients()) + " client outputs, got " +
                          std::to_string(outputs.size()),
                      "aggregate");
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].client != i || outputs[i].objectives != a.objectives_of(i) ||
        outputs[i].deltas.size() != outputs[i].objectives.size()) {
      throw ConfigError("missing or misaligned output for client " + std::to_string(i),
                        "aggregate");
    }
  }
  auto delta_of = [&](std::size_t client, std::size_t s) -> const Vector& {
    const auto& out = outputs[client];
    for (std::size_t o = 0; o < out.objectives.size(); ++o) {
      if (out.objectives[o] == s) return out.deltas[o];
    }
    throw ConfigError("client " + std::to_string(client) + " did not report objective " +
                          std::to_string(s),
                      "aggregate");
  };

  DirectionSet g;
  g.role = DirectionRole::kAccumulatedUpdates;
  g.rows.resize(static_cast<Eigen::Index>(a.objectives()),
                static_cast<Eigen::Index>(problem.dimension()));
  for (std::size_t s = 0; s < a.objectives(); ++s) {
    const auto& owners = a.owners(s);
    Vector acc;
    if (problem.balanced()) {
      acc = delta_of(owners[0], s);
      for (std::size_t k = 1; k < owners.size(); ++k) acc += delta_of(owners[k], s);
      acc /= static_cast<double>(owners.size());
    } else {
      const auto& w = problem.aggregation_weights(s);
      acc = w[0] * delta_of(owners[0], s);
      for (std::size_t k = 1; k < owners.size(); ++k) acc += w[k] * delta_of(owners[k], s);
    }
    if (normalize_by_k) acc /= static_cast<double>(local_steps);
    g.rows.row(static_cast<Eigen::Index>(s)) = acc.transpose();
  }
  return g;
}

ModelPoint InitialPoint(const ExperimentConfig& config) {
  if (config.initial_point.empty()) return Vector::Zero(static_cast<Eigen::Index>(config.dimension));
  return Eigen::Map<const Vector>(config.initial_point.data(),
                                  static_cast<Eigen::Index>(config.initial_point.size()));
}

RoundResult RunRound(const ModelPoint& x_t, long t, const ExperimentConfig& config,
                     const Problem& problem, const EngineOptions& options) {
  const std::size_t m = problem.clients();
  std::vector<ClientRoundOutput> outputs(m);
  auto update = [&](std::size_t i) {
    if (config.mode == GradientMode::kFull) {
      outputs[i] = ClientUpdateFull(problem, x_t, i, config.local_steps, config.eta_local, t);
    } else {
      outputs[i] = ClientUpdateStochastic(problem, x_t, i, config.local_steps, config.eta_local,
                                          config.batch_size, config.sample_sharing, config.seed, t);
    }
  };

  const std::size_t jobs = std::min(options.jobs, m);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < m; ++i) update(i);
  } else {
    std::vector<std::exception_ptr> errors(m);
    {
      std::vector<std::jthread> workers;
      for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < m; i += jobs) {
            try {
              update(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RoundResult result;
  const DirectionSet aggregated =
      ServerAggregate(outputs, problem, config.local_steps, config.normalize_delta_by_k);
  minnorm::Options qp;
  qp.tol = config.minnorm_tol;
  qp.max_iter = config.EffectiveMaxIter();
  result.solution = minnorm::SolveMinNorm(aggregated, qp);

  result.next = x_t - config.eta_global * result.solution.direction;
  if (!AllFinite(result.next) || result.next.norm() > kDivergenceRadius) {
    throw DivergenceError("global iterate diverged at round " + std::to_string(t) +
                              " (||x|| = " + std::to_string(result.next.norm()) + ")",
                          t);
  }

  RoundRecord& rec = result.record;
  rec.t = t;
  rec.lambda = result.solution.lambda;
  rec.d_norm_sq = result.solution.norm_sq;
  rec.fw_gap = result.solution.fw_gap;
  rec.losses = problem.Losses(x_t);
  const DirectionSet truth = problem.Gradients(x_t);
  rec.dbar_norm_sq = metrics::DbarNormSq(rec.lambda, truth);
  rec.running_min_dbar = rec.dbar_norm_sq;
  if (problem.has_pareto_reference()) rec.delta_q = metrics::DeltaQ(rec.lambda, x_t, problem);
  if (options.compute_lambda_drift) rec.lambda_drift = metrics::LambdaDrift(rec.lambda, truth, qp);
  return result;
}

TrajectoryLog RunExperiment(const ExperimentConfig& config, const Problem& problem,
                            const EngineOptions& options) {
  Validate(config);
  if (problem.objectives() != config.objectives || problem.clients() != config.clients ||
      problem.dimension() != config.dimension) {
    throw ConfigError("problem shape does not match config (S, M, d)", "problem");
  }
  if (config.mode == GradientMode::kStochastic && config.batch_size > 0) {
    for (std::size_t i = 0; i < problem.clients(); ++i) {
      if (config.batch_size > problem.ShardSize(i)) {
        throw ConfigError("shard of client " + std::to_string(i) + " (" +
                              std::to_string(problem.ShardSize(i)) +
                              " samples) is too small for the batch",
                          "batch_size");
      }
    }
  }

  TrajectoryLog log;
  log.config = config;
  log.rounds.reserve(config.rounds);
  ModelPoint x = InitialPoint(config);

  const double mu = problem.constants().mu;
  std::optional<WeightedOutputSampler> sampler;
  if (mu > 0.0 && mu * config.eta_global / 2.0 < 1.0) {
    sampler.emplace(mu, config.eta_global,
                    RandomStream(config.seed, StreamDomain::kOutputSelection, 0, 0, 0, 0));
  }

  double running_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t <= config.rounds; ++t) {
    RoundResult r;
    try {
      r = RunRound(x, static_cast<long>(t), config, problem, options);
    } catch (const DivergenceError& e) {
      log.status = RunStatus::kDiverged;
      log.message = e.what();
      break;
    }
    running_min = std::min(running_min, r.record.dbar_norm_sq);
    r.record.running_min_dbar = running_min;
    if (config.snapshot_every > 0 && (t - 1) % config.snapshot_every == 0) {
      r.record.x_snapshot = x;
    }
    if (sampler) sampler->Offer(static_cast<long>(t), x);
    log.rounds.push_back(std::move(r.record));
    x = std::move(r.next);
  }
  log.final_point = x;
  if (sampler && sampler->selected_round()) {
    log.weighted_output = sampler->selected_point();
    log.weighted_output_round = sampler->selected_round();
  }
  return log;
}

}  // namespace fmoo::federation
