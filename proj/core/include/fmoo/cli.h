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

#ifndef FMOO_CLI_H_
#define FMOO_CLI_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fmoo/config.h"

namespace fmoo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitVerifyFailed = 4;

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "FMOO_OUTPUT_ROOT";

// Resolves --out: explicit value, else $FMOO_OUTPUT_ROOT/<fallback_name>,
// else ./<fallback_name>.
std::filesystem::path ResolveOutputDir(const std::string& out, const std::string& fallback_name);

struct RunOptions {
  bool force = false;
  std::size_t jobs = 1;
};

int CmdRun(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
           const RunOptions& options, std::ostream& out, std::ostream& err);

enum class SweepAxis { kLocalSteps, kBatchSize, kEtaLocal, kClients, kHeterogeneity };

struct SweepSpec {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::kLocalSteps;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;  // empty: base seed only
  // Applies value `v` to a copy of base. Throws ConfigError if the result
  // is not a valid config.
  ExperimentConfig Member(double v, std::optional<std::uint64_t> seed = {}) const;
  static std::string RunName(SweepAxis axis, double v, std::optional<std::uint64_t> seed);
};

// {"base": {...}, "axis": "K", "values": [...], "seeds": [...]}.
SweepSpec ParseSweep(const nlohmann::json& j);
const char* ToString(SweepAxis a);

int CmdSweep(const std::filesystem::path& sweep_path, const std::filesystem::path& out_dir,
             const RunOptions& options, std::ostream& out, std::ostream& err);

// Writes report.csv (run_id,t,metric,value) and report.txt into out_dir.
int CmdReport(const std::vector<std::filesystem::path>& run_dirs,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

enum class VerifyLevel { kQuick, kFull };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kQuick;
  // Test hook: overrides the solver tolerance used by the oracle check.
  std::optional<double> solver_tol_override;
  std::optional<std::size_t> solver_max_iter_override;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // includes the failing instance seed
  double seconds = 0.0;
};

std::vector<CheckResult> RunVerification(const VerifyOptions& options);
int CmdVerify(const VerifyOptions& options, std::ostream& out);

}  // namespace fmoo::cli

#endif  // FMOO_CLI_H_
