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

#ifndef FMOO_WEIGHTED_OUTPUT_H_
#define FMOO_WEIGHTED_OUTPUT_H_

#include <cstddef>
#include <optional>

#include "fmoo/random.h"
#include "fmoo/types.h"

namespace fmoo {

namespace federation {
struct TrajectoryLog;
}

// Single-pass random clock over rounds t = 1, 2, ... selecting round t with
// probability proportional to w_t = (1 - mu*eta/2)^(1 - t). Weights are
// handled in log space.
class WeightedOutputSampler {
 public:
  // Throws NumericError unless mu > 0 and 0 < mu*eta/2 < 1.
  WeightedOutputSampler(double mu, double eta, RandomStream stream);

  // Rounds must be offered in order starting at 1. The point is copied only
  // when it is selected.
  void Offer(long t, const ModelPoint& x);
  // Index-only variant.
  void Offer(long t);

  std::optional<long> selected_round() const { return selected_round_; }
  const std::optional<ModelPoint>& selected_point() const { return selected_point_; }

  static double LogWeight(long t, double mu, double eta);

 private:
  bool Accept(long t);

  double log_ratio_;  // log(1 - mu*eta/2)
  RandomStream stream_;
  long last_t_ = 0;
  double log_total_ = 0.0;
  std::optional<long> selected_round_;
  std::optional<ModelPoint> selected_point_;
};

// Draws one round index from {1..rounds} with the weights above.
long PickWeightedIndex(std::size_t rounds, double mu, double eta, RandomStream stream);

// Picks x_t from a trajectory recorded with a snapshot every round.
// Throws NumericError if a needed snapshot is missing.
ModelPoint PickWeightedOutput(const federation::TrajectoryLog& log, double mu, double eta,
                              RandomStream stream);

}  // namespace fmoo

#endif  // FMOO_WEIGHTED_OUTPUT_H_
