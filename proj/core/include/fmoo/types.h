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

#ifndef FMOO_TYPES_H_
#define FMOO_TYPES_H_

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace fmoo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The d-dimensional decision vector x.
using ModelPoint = Vector;

bool AllFinite(const Eigen::Ref<const Vector>& v);

// A point of the probability simplex. Construction clamps tiny negative
// entries to zero and divides by the sum, so the invariants hold exactly up
// to one rounding of the final division.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  // Throws NumericError for empty, non-finite, or all-nonpositive input.
  static SimplexWeights Normalize(Vector raw);
  static SimplexWeights Uniform(std::size_t n);
  static SimplexWeights Vertex(std::size_t n, std::size_t index);

  const Vector& values() const { return w_; }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }

 private:
  explicit SimplexWeights(Vector w) : w_(std::move(w)) {}
  Vector w_;
};

enum class DirectionRole { kAccumulatedUpdates, kTrueGradients };

// S rows of length d: aggregated per-objective updates, or full gradients.
struct DirectionSet {
  Matrix rows;
  DirectionRole role = DirectionRole::kAccumulatedUpdates;

  std::size_t objectives() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(rows.cols()); }
};

// Per-round telemetry. Metrics are evaluated at x_t, the point the round
// starts from; `lambda` and `d_norm_sq` come from the round's QP.
struct RoundRecord {
  long t = 0;
  SimplexWeights lambda;
  double d_norm_sq = 0.0;
  double dbar_norm_sq = 0.0;
  double running_min_dbar = 0.0;
  std::vector<double> losses;
  std::optional<double> delta_q;
  double fw_gap = 0.0;
  std::optional<double> lambda_drift;
  std::optional<ModelPoint> x_snapshot;
};

}  // namespace fmoo

#endif  // FMOO_TYPES_H_
