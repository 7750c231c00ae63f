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
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fmoo/errors.h"
#include "fmoo/problem.h"
#include "fmoo/random.h"

namespace fmoo {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Dataset GenerateClassificationData(const ClassificationSuiteParams& p, std::size_t samples) {
  if (p.dimension < 2) throw ConfigError("classification suite needs d >= 2", "dimension");
  if (p.classes < 2) throw ConfigError("need at least two classes", "problem.classes");
  if (p.objectives == 0) throw ConfigError("must be positive", "objectives");
  const std::size_t features = p.dimension - 1;  // last coordinate is the bias
  RandomStream rng(p.seed, StreamDomain::kProblemGeneration, 6, 0, 0, 0);

  Matrix means(static_cast<Eigen::Index>(p.classes), static_cast<Eigen::Index>(features));
  const double scale = p.separation / std::sqrt(static_cast<double>(features));
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    for (Eigen::Index k = 0; k < means.cols(); ++k) means(c, k) = scale * rng.Normal();
  }
  // Task s labels a class positive iff it is in a random half of the classes.
  Matrix positive(static_cast<Eigen::Index>(p.objectives), static_cast<Eigen::Index>(p.classes));
  for (std::size_t s = 0; s < p.objectives; ++s) {
    std::vector<std::size_t> order(p.classes);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.UniformIndex(k)]);
    positive.row(static_cast<Eigen::Index>(s)).setZero();
    for (std::size_t k = 0; k < p.classes / 2; ++k) {
      positive(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(order[k])) = 1.0;
    }
  }

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(p.dimension));
  data.task_labels.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(p.objectives));
  data.classes.resize(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    const auto c = static_cast<Eigen::Index>(j % p.classes);
    data.classes[j] = static_cast<int>(c);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(features); ++k) {
      data.features(row, k) = means(c, k) + rng.Normal();
    }
    data.features(row, static_cast<Eigen::Index>(features)) = 1.0;
    for (std::size_t s = 0; s < p.objectives; ++s) {
      data.task_labels(row, static_cast<Eigen::Index>(s)) = positive(static_cast<Eigen::Index>(s), c);
    }
  }
  return data;
}

ClassificationProblem::ClassificationProblem(IndicatorMatrix indicator,
                                             ClassificationSuiteParams params,
                                             std::vector<double> client_weights)
    : Problem(std::move(indicator), params.dimension, std::move(client_weights)),
      params_(params) {
  params_.objectives = objectives();
  data_ = GenerateClassificationData(params_, params_.samples_per_client * clients());
  Setup();
}

ClassificationProblem::ClassificationProblem(IndicatorMatrix indicator,
                                             ClassificationSuiteParams params, Dataset data,
                                             std::vector<double> client_weights)
    : Problem(std::move(indicator), params.dimension, std::move(client_weights)),
      params_(params),
      data_(std::move(data)) {
  params_.objectives = objectives();
  if (static_cast<std::size_t>(data_.features.cols()) != dimension()) {
    throw ConfigError("dataset feature width does not match dimension", "problem.dataset_file");
  }
  if (static_cast<std::size_t>(data_.task_labels.cols()) != objectives()) {
    throw ConfigError("dataset task count does not match objectives", "problem.dataset_file");
  }
  Setup();
}

void ClassificationProblem::Setup() {
  if (params_.regularization < 0.0) throw ConfigError("must be >= 0", "problem.regularization");
  plan_ = Partition(data_.classes, clients(), params_.label_skew, params_.labels_per_client,
                    params_.seed);
  for (std::size_t i = 0; i < clients(); ++i) {
    if (plan_.shards[i].empty()) {
      throw ConfigError("client " + std::to_string(i) + " received no samples", "problem.partition");
    }
  }
  smoothness_ = 0.0;
  max_feature_norm_ = 0.0;
  for (std::size_t i = 0; i < clients(); ++i) {
    Matrix gram = Matrix::Zero(data_.features.cols(), data_.features.cols());
    for (std::size_t j : plan_.shards[i]) {
      const Vector phi = data_.features.row(static_cast<Eigen::Index>(j)).transpose();
      gram += phi * phi.transpose();
      max_feature_norm_ = std::max(max_feature_norm_, phi.norm());
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff() / static_cast<double>(plan_.shards[i].size());
    smoothness_ = std::max(smoothness_, 0.25 * top);
  }
}

ProblemConstants ClassificationProblem::constants() const {
  ProblemConstants c;
  c.mu = params_.regularization;
  c.smoothness = smoothness_ + params_.regularization;
  c.bound_radius = params_.regularization > 0.0 ? 10.0 : std::numeric_limits<double>::infinity();
  const double reg = params_.regularization > 0.0 ? params_.regularization * c.bound_radius : 0.0;
  c.gradient_bound = max_feature_norm_ + reg;
  c.stochastic_bound = max_feature_norm_ + reg;
  return c;
}

double ClassificationProblem::SampleLoss(std::size_t s, std::size_t row, const Vector& x) const {
  const auto r = static_cast<Eigen::Index>(row);
  const double y = data_.task_labels(r, static_cast<Eigen::Index>(s)) > 0.5 ? 1.0 : -1.0;
  const double z = data_.features.row(r).dot(x);
  return Softplus(-y * z);
}

double ClassificationProblem::LocalLoss(std::size_t s, std::size_t client, const Vector& x) const {
  const auto& shard = plan_.shards[client];
  double acc = 0.0;
  for (std::size_t j : shard) acc += SampleLoss(s, j, x);
  return acc / static_cast<double>(shard.size()) + 0.5 * params_.regularization * x.squaredNorm();
}

Vector ClassificationProblem::LocalGradient(std::size_t s, std::size_t client,
                                            const Vector& x) const {
  const auto& shard = plan_.shards[client];
  Vector g = Vector::Zero(x.size());
  for (std::size_t j : shard) {
    const auto r = static_cast<Eigen::Index>(j);
    const double y = data_.task_labels(r, static_cast<Eigen::Index>(s)) > 0.5 ? 1.0 : -1.0;
    const double z = data_.features.row(r).dot(x);
    g += (-y * Sigmoid(-y * z)) * data_.features.row(r).transpose();
  }
  g /= static_cast<double>(shard.size());
  return g + params_.regularization * x;
}

std::size_t ClassificationProblem::ShardSize(std::size_t client) const {
  return plan_.shards[client].size();
}

Vector ClassificationProblem::SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                                             std::span<const std::size_t> samples) const {
  if (samples.empty()) throw NumericError("empty minibatch");
  const auto& shard = plan_.shards[client];
  Vector g = Vector::Zero(x.size());
  for (std::size_t k : samples) {
    const auto r = static_cast<Eigen::Index>(shard[k]);
    const double y = data_.task_labels(r, static_cast<Eigen::Index>(s)) > 0.5 ? 1.0 : -1.0;
    const double z = data_.features.row(r).dot(x);
    g += (-y * Sigmoid(-y * z)) * data_.features.row(r).transpose();
  }
  g /= static_cast<double>(samples.size());
  return g + params_.regularization * x;
}

void ClassificationProblem::AddHessian(std::size_t s, double weight, const Vector& x,
                                       Matrix& h) const {
  const auto& owners = Problem::indicator().owners(s);
  const auto& w = aggregation_weights(s);
  for (std::size_t k = 0; k < owners.size(); ++k) {
    const auto& shard = plan_.shards[owners[k]];
    const double scale = weight * w[k] / static_cast<double>(shard.size());
    for (std::size_t j : shard) {
      const auto r = static_cast<Eigen::Index>(j);
      const double p = Sigmoid(data_.features.row(r).dot(x));
      const Vector phi = data_.features.row(r).transpose();
      h.noalias() += (scale * p * (1.0 - p)) * (phi * phi.transpose());
    }
  }
}

ModelPoint ClassificationProblem::ParetoReference(const SimplexWeights& lambda) const {
  if (!has_pareto_reference()) throw NumericError("classification: needs regularization > 0");
  if (lambda.size() != objectives()) throw NumericError("lambda size mismatch");
  const auto d = static_cast<Eigen::Index>(dimension());
  auto value = [&](const Vector& x) {
    double v = 0.0;
    for (std::size_t s = 0; s < objectives(); ++s) {
      if (lambda[s] > 0.0) v += lambda[s] * Loss(s, x);
    }
    return v;
  };
  Vector x = Vector::Zero(d);
  double fx = value(x);
  for (int iter = 0; iter < 100; ++iter) {
    Vector grad = Vector::Zero(d);
    Matrix hess = Matrix::Identity(d, d) * params_.regularization;
    for (std::size_t s = 0; s < objectives(); ++s) {
      if (lambda[s] == 0.0) continue;
      grad += lambda[s] * Gradient(s, x);
      AddHessian(s, lambda[s], x, hess);
    }
    if (grad.norm() <= 1e-13) break;
    const Vector step = hess.ldlt().solve(grad);
    const double decrement = grad.dot(step);
    if (decrement < 1e-24) {
      x -= step;
      break;
    }
    // Backtracking on the Newton step; full steps near the optimum.
    double t = 1.0;
    Vector trial = x - step;
    double ft = value(trial);
    while (ft > fx - 0.25 * t * decrement && t > 1e-10) {
      t *= 0.5;
      trial = x - t * step;
      ft = value(trial);
    }
    if (t <= 1e-10) break;
    x = std::move(trial);
    fx = ft;
  }
  return x;
}

}  // namespace fmoo
