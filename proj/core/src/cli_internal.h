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

#ifndef FMOO_SRC_CLI_INTERNAL_H_
#define FMOO_SRC_CLI_INTERNAL_H_

#include <filesystem>
#include <iosfwd>

#include "fmoo/cli.h"

namespace fmoo::cli::internal {

bool HasRunOutputs(const std::filesystem::path& dir);

// Builds the problem, runs the experiment and writes the run directory.
// Returns a process exit code; diagnostics go to `err`.
int ExecuteRun(const ExperimentConfig& config, const std::filesystem::path& dir,
               const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace fmoo::cli::internal

#endif  // FMOO_SRC_CLI_INTERNAL_H_
