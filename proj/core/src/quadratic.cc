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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fmoo/errors.h"
#include "fmoo/problem.h"
#include "fmoo/random.h"

namespace fmoo {
namespace {

Vector NormalVector(RandomStream& rng, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.Normal();
  return v;
}

}  // namespace

QuadraticProblem::QuadraticProblem(IndicatorMatrix indicator, QuadraticSuiteParams params,
                                   std::vector<double> client_weights)
    : Problem(std::move(indicator), params.dimension, std::move(client_weights)),
      params_(std::move(params)) {
  const std::size_t s_count = objectives();
  const std::size_t m = clients();
  const std::size_t d = dimension();
  if (params_.centers.size() != s_count) {
    throw ConfigError("expected " + std::to_string(s_count) + " centres", "problem.centers");
  }
  for (std::size_t s = 0; s < s_count; ++s) {
    if (static_cast<std::size_t>(params_.centers[s].size()) != d || !AllFinite(params_.centers[s])) {
      throw ConfigError("centre must be a finite vector of length d",
                        "problem.centers[" + std::to_string(s) + "]");
    }
  }
  if (!(params_.curvature > 0.0)) throw ConfigError("must be positive", "problem.curvature");
  if (params_.curvature_spread < 0.0 || params_.curvature_spread >= 1.0) {
    throw ConfigError("must lie in [0, 1)", "problem.curvature_spread");
  }
  if (params_.heterogeneity < 0.0) throw ConfigError("must be >= 0", "problem.heterogeneity");
  if (params_.noise < 0.0) throw ConfigError("must be >= 0", "problem.noise");
  if (params_.samples_per_client == 0) {
    throw ConfigError("must be positive", "problem.samples_per_client");
  }

  client_centers_.assign(s_count, std::vector<Vector>(m));
  client_curvature_.assign(s_count, std::vector<double>(m, 0.0));
  global_centers_ = params_.centers;
  global_curvature_.assign(s_count, 0.0);

  const double radius_scale = params_.heterogeneity / std::sqrt(static_cast<double>(d));
  for (std::size_t s = 0; s < s_count; ++s) {
    RandomStream rng(params_.seed, StreamDomain::kProblemGeneration, 1,
                     static_cast<std::uint32_t>(s), 0, 0);
    const auto& owners = Problem::indicator().owners(s);
    const auto& w = aggregation_weights(s);
    std::vector<Vector> offsets;
    double qbar = 0.0;
    Vector weighted_offset = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < owners.size(); ++k) {
      const double u = 2.0 * rng.Uniform() - 1.0;
      const double q = params_.curvature * (1.0 + params_.curvature_spread * u);
      Vector off = NormalVector(rng, d) * radius_scale;
      client_curvature_[s][owners[k]] = q;
      qbar += w[k] * q;
      weighted_offset += (w[k] * q) * off;
      offsets.push_back(std::move(off));
    }
    // Zero the curvature-weighted mean offset so the owner average of the
    // client objectives is minimised exactly at c_s.
    weighted_offset /= qbar;
    for (std::size_t k = 0; k < owners.size(); ++k) {
      if (params_.heterogeneity == 0.0) {
        client_centers_[s][owners[k]] = params_.centers[s];
      } else {
        client_centers_[s][owners[k]] = params_.centers[s] + (offsets[k] - weighted_offset);
      }
    }
    global_curvature_[s] = qbar;
  }

  offsets_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    RandomStream rng(params_.seed, StreamDomain::kProblemGeneration, 2,
                     static_cast<std::uint32_t>(i), 0, 0);
    auto& shard = offsets_[i];
    shard.reserve(params_.samples_per_client);
    Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < params_.samples_per_client; ++j) {
      shard.push_back(NormalVector(rng, d) * params_.noise);
      mean += shard.back();
    }
    mean /= static_cast<double>(params_.samples_per_client);
    for (auto& xi : shard) xi -= mean;
  }

  degenerate_ = true;
  for (std::size_t s = 1; s < s_count; ++s) {
    if (global_centers_[s] != global_centers_[0]) degenerate_ = false;
  }
}

const Vector& QuadraticProblem::client_center(std::size_t s, std::size_t client) const {
  if (!indicator().at(s, client)) throw NumericError("client does not own objective");
  return client_centers_[s][client];
}

ProblemConstants QuadraticProblem::constants() const {
  ProblemConstants c;
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = 0.0;
  double center_norm = 0.0;
  for (std::size_t s = 0; s < objectives(); ++s) {
    for (std::size_t i : Problem::indicator().owners(s)) {
      q_min = std::min(q_min, client_curvature_[s][i]);
      q_max = std::max(q_max, client_curvature_[s][i]);
      center_norm = std::max(center_norm, client_centers_[s][i].norm());
    }
  }
  double noise_norm = 0.0;
  for (const auto& shard : offsets_) {
    for (const auto& xi : shard) noise_norm = std::max(noise_norm, xi.norm());
  }
  c.mu = q_min;
  c.smoothness = q_max;
  c.bound_radius = params_.bound_radius;
  c.gradient_bound = q_max * (params_.bound_radius + center_norm);
  c.stochastic_bound = q_max * (params_.bound_radius + center_norm + noise_norm);
  return c;
}

double QuadraticProblem::LocalLoss(std::size_t s, std::size_t client, const Vector& x) const {
  return 0.5 * client_curvature_[s][client] * (x - client_centers_[s][client]).squaredNorm();
}

Vector QuadraticProblem::LocalGradient(std::size_t s, std::size_t client, const Vector& x) const {
  return client_curvature_[s][client] * (x - client_centers_[s][client]);
}

std::size_t QuadraticProblem::ShardSize(std::size_t) const { return params_.samples_per_client; }

Vector QuadraticProblem::SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                                        std::span<const std::size_t> samples) const {
  if (samples.empty()) throw NumericError("empty minibatch");
  const auto& shard = offsets_[client];
  Vector mean = Vector::Zero(x.size());
  for (std::size_t j : samples) mean += shard[j];
  mean /= static_cast<double>(samples.size());
  return client_curvature_[s][client] * (x - client_centers_[s][client] - mean);
}

double QuadraticProblem::LossGap(std::size_t s, const Vector& x, const Vector& y) const {
  // ||x-c||^2 - ||y-c||^2 = <x - y, x + y - 2c>
  const Vector diff = x - y;
  const Vector sum = x + y;
  const auto& owners = Problem::indicator().owners(s);
  const auto& w = aggregation_weights(s);
  double acc = 0.0;
  for (std::size_t k = 0; k < owners.size(); ++k) {
    const std::size_t i = owners[k];
    acc += w[k] * 0.5 * client_curvature_[s][i] *
           diff.dot(sum - 2.0 * client_centers_[s][i]);
  }
  return acc;
}

ModelPoint QuadraticProblem::ParetoReference(const SimplexWeights& lambda) const {
  if (lambda.size() != objectives()) throw NumericError("lambda size mismatch");
  Vector num = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  double den = 0.0;
  for (std::size_t s = 0; s < objectives(); ++s) {
    num += (lambda[s] * global_curvature_[s]) * global_centers_[s];
    den += lambda[s] * global_curvature_[s];
  }
  return num / den;
}

}  // namespace fmoo
