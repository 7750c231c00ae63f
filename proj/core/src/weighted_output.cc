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

#include "fmoo/weighted_output.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmoo/errors.h"
#include "fmoo/federation.h"

namespace fmoo {

WeightedOutputSampler::WeightedOutputSampler(double mu, double eta, RandomStream stream)
    : stream_(stream) {
  const double half = mu * eta / 2.0;
  if (!(mu > 0.0) || !(half > 0.0) || !(half < 1.0)) {
    throw NumericError("weighted output: need mu > 0 and 0 < mu*eta/2 < 1");
  }
  log_ratio_ = std::log1p(-half);
}

double WeightedOutputSampler::LogWeight(long t, double mu, double eta) {
  return static_cast<double>(1 - t) * std::log1p(-mu * eta / 2.0);
}

bool WeightedOutputSampler::Accept(long t) {
  if (t != last_t_ + 1) throw NumericError("weighted output: rounds must be offered in order");
  last_t_ = t;
  const double log_w = static_cast<double>(1 - t) * log_ratio_;
  if (t == 1) {
    log_total_ = log_w;
    selected_round_ = 1;
    return true;
  }
  // log(W_{t-1} + w_t), computed around the larger term.
  const double hi = std::max(log_total_, log_w);
  log_total_ = hi + std::log(std::exp(log_total_ - hi) + std::exp(log_w - hi));
  const double p = std::exp(log_w - log_total_);
  if (stream_.Uniform() < p) {
    selected_round_ = t;
    return true;
  }
  return false;
}

void WeightedOutputSampler::Offer(long t, const ModelPoint& x) {
  if (Accept(t)) selected_point_ = x;
}

void WeightedOutputSampler::Offer(long t) { Accept(t); }

long PickWeightedIndex(std::size_t rounds, double mu, double eta, RandomStream stream) {
  if (rounds == 0) throw NumericError("weighted output: empty trajectory");
  WeightedOutputSampler sampler(mu, eta, stream);
  for (std::size_t t = 1; t <= rounds; ++t) sampler.Offer(static_cast<long>(t));
  return *sampler.selected_round();
}

ModelPoint PickWeightedOutput(const federation::TrajectoryLog& log, double mu, double eta,
                              RandomStream stream) {
  const long t = PickWeightedIndex(log.rounds.size(), mu, eta, stream);
  const auto& rec = log.rounds[static_cast<std::size_t>(t - 1)];
  if (!rec.x_snapshot) {
    throw NumericError("weighted output: round " + std::to_string(t) + " has no snapshot");
  }
  return *rec.x_snapshot;
}

}  // namespace fmoo
