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

#ifndef FMOO_PROBLEM_FACTORY_H_
#define FMOO_PROBLEM_FACTORY_H_

#include <memory>

#include "fmoo/config.h"
#include "fmoo/problem.h"

namespace fmoo {

// Builds the suite described by `config.problem`, seeded from config.seed.
std::unique_ptr<Problem> MakeProblem(const ExperimentConfig& config);

}  // namespace fmoo

#endif  // FMOO_PROBLEM_FACTORY_H_
