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

#include "fmoo/mgd.h"

#include <utility>

namespace fmoo {

std::vector<ModelPoint> CentralizedMgd(const Problem& problem, ModelPoint x0, double eta,
                                       std::size_t steps, const minnorm::Options& options) {
  std::vector<ModelPoint> path;
  path.reserve(steps + 1);
  path.push_back(std::move(x0));
  for (std::size_t t = 0; t < steps; ++t) {
    const ModelPoint& x = path.back();
    const minnorm::Solution sol = minnorm::SolveMinNorm(problem.Gradients(x), options);
    path.push_back(x - eta * sol.direction);
  }
  return path;
}

}  // namespace fmoo
