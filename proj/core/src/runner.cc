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

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>

#include "cli_internal.h"
#include "fmoo/cli.h"
#include "fmoo/errors.h"
#include "fmoo/federation.h"
#include "fmoo/output.h"
#include "fmoo/problem_factory.h"

namespace fmoo::cli {

namespace fs = std::filesystem;

fs::path ResolveOutputDir(const std::string& out, const std::string& fallback_name) {
  if (!out.empty()) return fs::path(out);
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return fs::path(root) / fallback_name;
  }
  return fs::path(fallback_name);
}

namespace internal {

bool HasRunOutputs(const fs::path& dir) {
  return fs::exists(dir / "rounds.csv") || fs::exists(dir / "summary.json");
}

// Shared by `run` and `sweep`: executes one validated config into `dir`.
int ExecuteRun(const ExperimentConfig& config, const fs::path& dir, const RunOptions& options,
               std::ostream& out, std::ostream& err) {
  try {
    const auto problem = MakeProblem(config);
    federation::EngineOptions engine;
    engine.jobs = options.jobs == 0 ? 1 : options.jobs;
    const auto log = federation::RunExperiment(config, *problem, engine);
    WriteRunDirectory(dir, log);
    if (log.status == federation::RunStatus::kDiverged) {
      err << "diverged: " << log.message << " (partial log in " << dir.string() << ")\n";
      return kExitDiverged;
    }
    out << "wrote " << log.rounds.size() << " rounds to " << dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace internal

int CmdRun(const fs::path& config_path, const fs::path& out_dir, const RunOptions& options,
           std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = LoadConfig(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (internal::HasRunOutputs(out_dir) && !options.force) {
    err << "refusing to overwrite existing run in " << out_dir.string() << " (use --force)\n";
    return kExitUsage;
  }
  return internal::ExecuteRun(config, out_dir, options, out, err);
}

}  // namespace fmoo::cli
