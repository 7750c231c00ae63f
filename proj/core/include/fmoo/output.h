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

#ifndef FMOO_OUTPUT_H_
#define FMOO_OUTPUT_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fmoo/federation.h"

namespace fmoo {

inline constexpr int kRoundsCsvSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double v);
double ParseDouble(const std::string& s);

// Column-major view of a trajectory, as written to / read from rounds.csv.
struct RunSeries {
  std::size_t objectives = 0;
  std::vector<long> t;
  std::vector<std::vector<double>> lambda;  // [s][row]
  std::vector<double> d_norm_sq;
  std::vector<double> dbar_norm_sq;
  std::vector<double> running_min_dbar;
  std::vector<std::vector<double>> loss;    // [s][row]
  std::vector<std::optional<double>> delta_q;
  std::vector<double> fw_gap;
  std::vector<std::optional<double>> lambda_drift;

  std::size_t rows() const { return t.size(); }
  bool has_delta_q() const;
  // delta_q with missing entries removed; only meaningful if has_delta_q().
  std::vector<double> delta_q_values() const;
};

RunSeries ToSeries(const federation::TrajectoryLog& log);

std::string RoundsCsvHeader(std::size_t objectives);
void WriteRoundsCsv(std::ostream& os, const RunSeries& series);
// Throws ConfigError on a malformed header or row.
RunSeries ReadRoundsCsv(std::istream& is);

// Final metrics, rate fits and threshold counts. The single derivation
// shared by summary.json, sweep_summary.json and `report`.
nlohmann::json MetricsSummary(const RunSeries& series, const std::vector<double>& eps_list);

nlohmann::json RunSummary(const federation::TrajectoryLog& log);

// Writes rounds.csv and summary.json into `dir` (created if needed).
void WriteRunDirectory(const std::filesystem::path& dir, const federation::TrajectoryLog& log);

}  // namespace fmoo

#endif  // FMOO_OUTPUT_H_
