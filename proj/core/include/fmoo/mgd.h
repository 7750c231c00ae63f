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

#ifndef FMOO_MGD_H_
#define FMOO_MGD_H_

#include <cstddef>
#include <vector>

#include "fmoo/minnorm.h"
#include "fmoo/problem.h"
#include "fmoo/types.h"

namespace fmoo {

// Centralized multiple-gradient descent on the global objectives:
// x <- x - eta * d with d the min-norm point of the exact gradients.
// Returns the `steps + 1` iterates starting with x0.
std::vector<ModelPoint> CentralizedMgd(const Problem& problem, ModelPoint x0, double eta,
                                       std::size_t steps, const minnorm::Options& options = {});

}  // namespace fmoo

#endif  // FMOO_MGD_H_
