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

// sup |d^2/dz^2 tanh(z)| = sup |2 tanh(z) sech^2(z)| = 4 / (3 sqrt 3).
const double kTanhCurvature = 4.0 / (3.0 * std::sqrt(3.0));

Vector NormalVector(RandomStream& rng, std::size_t d, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = scale * rng.Normal();
  return v;
}

double TermsValue(const std::vector<TanhTerm>& terms, const Vector& x) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.a * std::tanh(t.w.dot(x) + t.b);
  return acc;
}

Vector TermsGradient(const std::vector<TanhTerm>& terms, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (const auto& t : terms) {
    const double th = std::tanh(t.w.dot(x) + t.b);
    g += (t.a * (1.0 - th * th)) * t.w;
  }
  return g;
}

}  // namespace

ToyNonconvexProblem::ToyNonconvexProblem(IndicatorMatrix indicator, ToySuiteParams params,
                                         std::vector<double> client_weights)
    : Problem(std::move(indicator), params.dimension, std::move(client_weights)),
      params_(params) {
  const std::size_t d = dimension();
  if (d < 2) throw ConfigError("toy non-convex suite needs d >= 2", "dimension");
  if (params_.terms == 0) throw ConfigError("must be positive", "problem.terms");
  if (params_.rho < 0.0) throw ConfigError("must be >= 0", "problem.rho");
  if (params_.heterogeneity < 0.0) throw ConfigError("must be >= 0", "problem.heterogeneity");
  if (params_.noise < 0.0) throw ConfigError("must be >= 0", "problem.noise");
  if (params_.samples_per_client == 0) {
    throw ConfigError("must be positive", "problem.samples_per_client");
  }
  params_.objectives = objectives();

  const double w_scale = 1.0 / std::sqrt(static_cast<double>(d));
  terms_.assign(objectives(), std::vector<std::vector<TanhTerm>>(clients()));
  for (std::size_t s = 0; s < objectives(); ++s) {
    RandomStream base_rng(params_.seed, StreamDomain::kProblemGeneration, 3,
                          static_cast<std::uint32_t>(s), 0, 0);
    std::vector<TanhTerm> base(params_.terms);
    for (auto& t : base) {
      t.a = params_.coefficient_scale * base_rng.Normal();
      t.w = NormalVector(base_rng, d, 2.0 * w_scale);
      t.b = base_rng.Normal();
    }
    for (std::size_t i : Problem::indicator().owners(s)) {
      RandomStream rng(params_.seed, StreamDomain::kProblemGeneration, 4,
                       static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i), 0);
      auto& local = terms_[s][i];
      local = base;
      if (params_.heterogeneity > 0.0) {
        for (auto& t : local) {
          t.a += params_.heterogeneity * params_.coefficient_scale * rng.Normal();
          t.w += NormalVector(rng, d, params_.heterogeneity * w_scale);
          t.b += params_.heterogeneity * rng.Normal();
        }
      }
    }
  }

  noise_.assign(objectives(), std::vector<std::vector<Vector>>(clients()));
  for (std::size_t s = 0; s < objectives(); ++s) {
    for (std::size_t i : Problem::indicator().owners(s)) {
      RandomStream rng(params_.seed, StreamDomain::kProblemGeneration, 5,
                       static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i), 0);
      auto& shard = noise_[s][i];
      Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < params_.samples_per_client; ++j) {
        shard.push_back(NormalVector(rng, d, params_.noise));
        mean += shard.back();
      }
      mean /= static_cast<double>(params_.samples_per_client);
      for (auto& xi : shard) xi -= mean;
    }
  }
  ComputeConstants();
}

ToyNonconvexProblem::ToyNonconvexProblem(IndicatorMatrix indicator, std::size_t dimension,
                                         std::vector<std::vector<TanhTerm>> terms_per_objective,
                                         double rho)
    : Problem(std::move(indicator), dimension) {
  if (dimension < 2) throw ConfigError("toy non-convex suite needs d >= 2", "dimension");
  if (terms_per_objective.size() != objectives()) {
    throw ConfigError("expected one term list per objective", "problem.terms");
  }
  if (rho < 0.0) throw ConfigError("must be >= 0", "problem.rho");
  params_.dimension = dimension;
  params_.objectives = objectives();
  params_.rho = rho;
  params_.noise = 0.0;
  params_.samples_per_client = 1;
  terms_.assign(objectives(), std::vector<std::vector<TanhTerm>>(clients()));
  noise_.assign(objectives(), std::vector<std::vector<Vector>>(clients()));
  for (std::size_t s = 0; s < objectives(); ++s) {
    for (const auto& t : terms_per_objective[s]) {
      if (static_cast<std::size_t>(t.w.size()) != dimension) {
        throw ConfigError("term weight has wrong length", "problem.terms");
      }
    }
    for (std::size_t i : Problem::indicator().owners(s)) {
      terms_[s][i] = terms_per_objective[s];
      noise_[s][i].assign(1, Vector::Zero(static_cast<Eigen::Index>(dimension)));
    }
  }
  ComputeConstants();
}

void ToyNonconvexProblem::ComputeConstants() {
  smoothness_ = 0.0;
  tanh_gradient_bound_ = 0.0;
  noise_bound_ = 0.0;
  for (std::size_t s = 0; s < objectives(); ++s) {
    for (std::size_t i : Problem::indicator().owners(s)) {
      double curv = 0.0;
      double grad = 0.0;
      for (const auto& t : terms_[s][i]) {
        curv += std::abs(t.a) * kTanhCurvature * t.w.squaredNorm();
        grad += std::abs(t.a) * t.w.norm();
      }
      smoothness_ = std::max(smoothness_, curv);
      tanh_gradient_bound_ = std::max(tanh_gradient_bound_, grad);
      for (const auto& xi : noise_[s][i]) noise_bound_ = std::max(noise_bound_, xi.norm());
    }
  }
}

ProblemConstants ToyNonconvexProblem::constants() const {
  ProblemConstants c;
  c.mu = 0.0;
  c.smoothness = smoothness_ + params_.rho;
  if (params_.rho == 0.0) {
    c.bound_radius = std::numeric_limits<double>::infinity();
    c.gradient_bound = tanh_gradient_bound_;
    c.stochastic_bound = tanh_gradient_bound_ + noise_bound_;
  } else {
    c.bound_radius = params_.bound_radius;
    c.gradient_bound = tanh_gradient_bound_ + params_.rho * params_.bound_radius;
    c.stochastic_bound = *c.gradient_bound + noise_bound_;
  }
  return c;
}

const std::vector<TanhTerm>& ToyNonconvexProblem::terms(std::size_t s, std::size_t client) const {
  if (!indicator().at(s, client)) throw NumericError("client does not own objective");
  return terms_[s][client];
}

double ToyNonconvexProblem::LowerBound(std::size_t s) const {
  double worst = 0.0;
  for (std::size_t i : Problem::indicator().owners(s)) {
    double total = 0.0;
    for (const auto& t : terms_[s][i]) total += std::abs(t.a);
    worst = std::max(worst, total);
  }
  return -worst;
}

double ToyNonconvexProblem::LocalLoss(std::size_t s, std::size_t client, const Vector& x) const {
  return TermsValue(terms_[s][client], x) + 0.5 * params_.rho * x.squaredNorm();
}

Vector ToyNonconvexProblem::LocalGradient(std::size_t s, std::size_t client,
                                          const Vector& x) const {
  return TermsGradient(terms_[s][client], x) + params_.rho * x;
}

std::size_t ToyNonconvexProblem::ShardSize(std::size_t) const {
  return params_.samples_per_client;
}

// Sample j contributes <xi_j, x> to the loss; the xi_j are centred.
Vector ToyNonconvexProblem::SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                                           std::span<const std::size_t> samples) const {
  if (samples.empty()) throw NumericError("empty minibatch");
  const auto& shard = noise_[s][client];
  Vector mean = Vector::Zero(x.size());
  for (std::size_t j : samples) mean += shard[j];
  mean /= static_cast<double>(samples.size());
  return LocalGradient(s, client, x) + mean;
}

}  // namespace fmoo
