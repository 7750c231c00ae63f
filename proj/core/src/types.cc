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

#include "fmoo/types.h"

#include <cmath>

#include "fmoo/errors.h"

namespace fmoo {

bool AllFinite(const Eigen::Ref<const Vector>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

SimplexWeights SimplexWeights::Normalize(Vector raw) {
  if (raw.size() == 0) throw NumericError("simplex weights: empty vector");
  if (!AllFinite(raw)) throw NumericError("simplex weights: non-finite entry");
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0.0) raw[i] = 0.0;
  }
  const double sum = raw.sum();
  if (!(sum > 0.0)) throw NumericError("simplex weights: no positive mass");
  raw /= sum;
  return SimplexWeights(std::move(raw));
}

SimplexWeights SimplexWeights::Uniform(std::size_t n) {
  if (n == 0) throw NumericError("simplex weights: empty vector");
  return SimplexWeights(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

SimplexWeights SimplexWeights::Vertex(std::size_t n, std::size_t index) {
  if (index >= n) throw NumericError("simplex weights: vertex index out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return SimplexWeights(std::move(w));
}

}  // namespace fmoo
