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

#ifndef FMOO_CONFIG_H_
#define FMOO_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fmoo/indicator.h"

namespace fmoo {

enum class GradientMode { kFull, kStochastic };
enum class SampleSharing { kPerClient, kPerObjective };
enum class ProblemKind { kQuadratic, kToyNonconvex, kClassification };
enum class PartitionSkew { kIid, kLabelSkew };

// Parameters of the synthetic suite. Fields not used by `kind` keep their
// defaults and are rejected by the parser if present.
struct ProblemConfig {
  ProblemKind kind = ProblemKind::kQuadratic;

  // Shared knobs.
  double heterogeneity = 0.0;  // client spread (quadratic/toy)
  int samples_per_client = 64;
  double noise = 0.5;          // per-sample gradient noise scale

  // Quadratic suite.
  double curvature = 1.0;
  double curvature_spread = 0.0;  // relative client curvature jitter in [0, 1)
  std::vector<std::vector<double>> centers;  // S x d; generated when empty
  double center_scale = 1.0;

  // Toy non-convex suite.
  int terms = 4;
  double rho = 0.05;
  double coefficient_scale = 1.0;

  // Classification suite.
  int classes = 10;
  PartitionSkew partition = PartitionSkew::kIid;
  int labels_per_client = 2;
  double regularization = 1e-2;
  double separation = 2.0;
  std::string dataset_file;
};

// One replayable experiment: everything needed besides the binary.
struct ExperimentConfig {
  std::size_t clients = 1;      // M
  std::size_t objectives = 1;   // S
  std::size_t dimension = 2;    // d
  std::string indicator_kind = "all-ones";  // all-ones | identity | explicit
  IndicatorMatrix indicator = IndicatorMatrix::AllOnes(1, 1);
  std::vector<double> client_weights;  // empty: balanced 1/|R_s|

  std::size_t local_steps = 1;  // K
  std::size_t rounds = 1;       // T
  double eta_global = 0.1;
  double eta_local = 0.0;
  GradientMode mode = GradientMode::kFull;
  std::size_t batch_size = 0;   // 0: full shard
  std::uint64_t seed = 0;
  SampleSharing sample_sharing = SampleSharing::kPerClient;
  bool normalize_delta_by_k = true;
  std::vector<double> initial_point;  // empty: zero vector
  std::size_t snapshot_every = 0;     // 0: no snapshots

  double minnorm_tol = 1e-10;
  std::size_t minnorm_max_iter = 0;   // 0: 10*S*d + 1000

  std::vector<double> threshold_eps = {1e-1, 1e-2, 1e-3};

  ProblemConfig problem;

  std::size_t EffectiveMaxIter() const;
};

// Throws ConfigError with the JSON path of the first violation. Unknown
// keys are errors.
ExperimentConfig ParseConfig(const nlohmann::json& j);
ExperimentConfig LoadConfig(const std::filesystem::path& path);
// Re-checks invariants after programmatic edits (sweeps, tests).
void Validate(const ExperimentConfig& c);
// Full echo; ParseConfig(ToJson(c)) reproduces c.
nlohmann::json ToJson(const ExperimentConfig& c);

// Rebuilds the indicator after clients/objectives changed, for the
// shortcut kinds. Explicit matrices are left alone.
void RefreshIndicator(ExperimentConfig& c);

const char* ToString(GradientMode m);
const char* ToString(SampleSharing s);
const char* ToString(ProblemKind k);
const char* ToString(PartitionSkew p);

}  // namespace fmoo

#endif  // FMOO_CONFIG_H_
