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

#include "fmoo/problem.h"

#include <cmath>
#include <string>

#include "fmoo/errors.h"

namespace fmoo {

Problem::Problem(IndicatorMatrix indicator, std::size_t dimension,
                 std::vector<double> client_weights)
    : indicator_(std::move(indicator)),
      dimension_(dimension),
      client_weights_(std::move(client_weights)) {
  if (dimension_ == 0) throw ConfigError("dimension must be positive", "dimension");
  if (!client_weights_.empty()) {
    if (client_weights_.size() != indicator_.clients()) {
      throw ConfigError("expected one weight per client", "client_weights");
    }
    for (std::size_t i = 0; i < client_weights_.size(); ++i) {
      if (!(client_weights_[i] > 0.0) || !std::isfinite(client_weights_[i])) {
        throw ConfigError("weights must be positive and finite",
                          "client_weights[" + std::to_string(i) + "]");
      }
    }
  }
  agg_weights_.resize(indicator_.objectives());
  for (std::size_t s = 0; s < indicator_.objectives(); ++s) {
    const auto& owners = indicator_.owners(s);
    if (client_weights_.empty()) {
      agg_weights_[s].assign(owners.size(), 1.0 / static_cast<double>(owners.size()));
    } else {
      double total = 0.0;
      for (std::size_t i : owners) total += client_weights_[i];
      for (std::size_t i : owners) agg_weights_[s].push_back(client_weights_[i] / total);
    }
  }
}

template <typename F>
auto Problem::Aggregate(std::size_t s, F&& per_client) const {
  const auto& owners = indicator_.owners(s);
  if (client_weights_.empty()) {
    auto acc = per_client(owners[0]);
    for (std::size_t k = 1; k < owners.size(); ++k) acc += per_client(owners[k]);
    acc /= static_cast<double>(owners.size());
    return acc;
  }
  const auto& w = agg_weights_[s];
  auto acc = per_client(owners[0]);
  acc *= w[0];
  for (std::size_t k = 1; k < owners.size(); ++k) {
    auto term = per_client(owners[k]);
    term *= w[k];
    acc += term;
  }
  return acc;
}

double Problem::Loss(std::size_t s, const Vector& x) const {
  return Aggregate(s, [&](std::size_t i) { return LocalLoss(s, i, x); });
}

Vector Problem::Gradient(std::size_t s, const Vector& x) const {
  return Aggregate(s, [&](std::size_t i) -> Vector { return LocalGradient(s, i, x); });
}

std::vector<double> Problem::Losses(const Vector& x) const {
  std::vector<double> out(objectives());
  for (std::size_t s = 0; s < objectives(); ++s) out[s] = Loss(s, x);
  return out;
}

DirectionSet Problem::Gradients(const Vector& x) const {
  DirectionSet g;
  g.role = DirectionRole::kTrueGradients;
  g.rows.resize(static_cast<Eigen::Index>(objectives()), static_cast<Eigen::Index>(dimension_));
  for (std::size_t s = 0; s < objectives(); ++s) {
    g.rows.row(static_cast<Eigen::Index>(s)) = Gradient(s, x).transpose();
  }
  return g;
}

double Problem::LossGap(std::size_t s, const Vector& x, const Vector& y) const {
  return Loss(s, x) - Loss(s, y);
}

ModelPoint Problem::ParetoReference(const SimplexWeights&) const {
  throw NumericError(name() + ": no Pareto reference available");
}

}  // namespace fmoo
