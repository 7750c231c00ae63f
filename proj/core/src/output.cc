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

#include "fmoo/output.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "fmoo/errors.h"
#include "fmoo/metrics.h"

namespace fmoo {

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + s + "'", "rounds.csv");
  }
  return v;
}

bool RunSeries::has_delta_q() const {
  for (const auto& v : delta_q) {
    if (v) return true;
  }
  return false;
}

std::vector<double> RunSeries::delta_q_values() const {
  std::vector<double> out;
  for (const auto& v : delta_q) {
    if (v) out.push_back(*v);
  }
  return out;
}

RunSeries ToSeries(const federation::TrajectoryLog& log) {
  RunSeries r;
  r.objectives = log.config.objectives;
  r.lambda.resize(r.objectives);
  r.loss.resize(r.objectives);
  for (const auto& rec : log.rounds) {
    r.t.push_back(rec.t);
    for (std::size_t s = 0; s < r.objectives; ++s) {
      r.lambda[s].push_back(rec.lambda[s]);
      r.loss[s].push_back(rec.losses[s]);
    }
    r.d_norm_sq.push_back(rec.d_norm_sq);
    r.dbar_norm_sq.push_back(rec.dbar_norm_sq);
    r.running_min_dbar.push_back(rec.running_min_dbar);
    r.delta_q.push_back(rec.delta_q);
    r.fw_gap.push_back(rec.fw_gap);
    r.lambda_drift.push_back(rec.lambda_drift);
  }
  return r;
}

std::string RoundsCsvHeader(std::size_t objectives) {
  std::string h = "t";
  for (std::size_t s = 1; s <= objectives; ++s) h += ",lambda_" + std::to_string(s);
  h += ",d_norm_sq,dbar_norm_sq,running_min_dbar";
  for (std::size_t s = 1; s <= objectives; ++s) h += ",loss_" + std::to_string(s);
  h += ",delta_Q,fw_gap,lambda_drift";
  return h;
}

void WriteRoundsCsv(std::ostream& os, const RunSeries& r) {
  os << RoundsCsvHeader(r.objectives) << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : std::string(); };
  for (std::size_t k = 0; k < r.rows(); ++k) {
    os << r.t[k];
    for (std::size_t s = 0; s < r.objectives; ++s) os << ',' << FormatDouble(r.lambda[s][k]);
    os << ',' << FormatDouble(r.d_norm_sq[k]) << ',' << FormatDouble(r.dbar_norm_sq[k]) << ','
       << FormatDouble(r.running_min_dbar[k]);
    for (std::size_t s = 0; s < r.objectives; ++s) os << ',' << FormatDouble(r.loss[s][k]);
    os << ',' << opt(r.delta_q[k]) << ',' << FormatDouble(r.fw_gap[k]) << ','
       << opt(r.lambda_drift[k]) << '\n';
  }
}

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

RunSeries ReadRoundsCsv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("empty file", "rounds.csv");
  const auto cols = SplitCsv(header);
  std::size_t s_count = 0;
  while (1 + s_count < cols.size() && cols[1 + s_count].rfind("lambda_", 0) == 0) ++s_count;
  if (s_count == 0 || header != RoundsCsvHeader(s_count)) {
    throw ConfigError("unexpected header: " + header, "rounds.csv");
  }
  RunSeries r;
  r.objectives = s_count;
  r.lambda.resize(s_count);
  r.loss.resize(s_count);
  const std::size_t width = 2 * s_count + 7;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != width) {
      throw ConfigError("line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                            " fields, expected " + std::to_string(width),
                        "rounds.csv");
    }
    std::size_t c = 0;
    r.t.push_back(std::stol(f[c++]));
    for (std::size_t s = 0; s < s_count; ++s) r.lambda[s].push_back(ParseDouble(f[c++]));
    r.d_norm_sq.push_back(ParseDouble(f[c++]));
    r.dbar_norm_sq.push_back(ParseDouble(f[c++]));
    r.running_min_dbar.push_back(ParseDouble(f[c++]));
    for (std::size_t s = 0; s < s_count; ++s) r.loss[s].push_back(ParseDouble(f[c++]));
    const std::string& dq = f[c++];
    r.delta_q.push_back(dq.empty() ? std::nullopt : std::optional<double>(ParseDouble(dq)));
    r.fw_gap.push_back(ParseDouble(f[c++]));
    const std::string& ld = f[c++];
    r.lambda_drift.push_back(ld.empty() ? std::nullopt : std::optional<double>(ParseDouble(ld)));
  }
  return r;
}

namespace {

nlohmann::json FitJson(const metrics::RateFit& f) {
  return {{"series", f.series},       {"model", metrics::ToString(f.model)},
          {"slope", f.slope},         {"intercept", f.intercept},
          {"residual", f.residual},   {"t_lo", f.t_lo},
          {"t_hi", f.t_hi},           {"clipped", f.clipped}};
}

nlohmann::json Thresholds(const std::vector<double>& series, const std::vector<double>& eps_list) {
  nlohmann::json j = nlohmann::json::object();
  for (double eps : eps_list) {
    const auto n = metrics::RoundsToThreshold(series, eps);
    j[FormatDouble(eps)] = n ? nlohmann::json(*n) : nlohmann::json(nullptr);
  }
  return j;
}

}  // namespace

nlohmann::json MetricsSummary(const RunSeries& r, const std::vector<double>& eps_list) {
  using nlohmann::json;
  json j;
  j["rounds"] = r.rows();
  if (r.rows() == 0) {
    j["final"] = nullptr;
    j["rate_fits"] = json::array();
    j["rounds_to_threshold"] = json::object();
    return j;
  }
  const std::size_t last = r.rows() - 1;
  json fin;
  fin["t"] = r.t[last];
  json lam = json::array(), loss = json::array();
  for (std::size_t s = 0; s < r.objectives; ++s) {
    lam.push_back(r.lambda[s][last]);
    loss.push_back(r.loss[s][last]);
  }
  fin["lambda"] = lam;
  fin["losses"] = loss;
  fin["d_norm_sq"] = r.d_norm_sq[last];
  fin["dbar_norm_sq"] = r.dbar_norm_sq[last];
  fin["running_min_dbar"] = r.running_min_dbar[last];
  fin["delta_Q"] = r.delta_q[last] ? json(*r.delta_q[last]) : json(nullptr);
  fin["fw_gap"] = r.fw_gap[last];
  fin["lambda_drift"] = r.lambda_drift[last] ? json(*r.lambda_drift[last]) : json(nullptr);
  j["final"] = fin;

  const std::vector<double> mean_dbar = metrics::RunningMean(r.dbar_norm_sq);
  j["mean_dbar_norm_sq"] = mean_dbar.back();

  json fits = json::array();
  if (r.rows() >= 10) {
    fits.push_back(FitJson(metrics::FitRateDefaultWindow(mean_dbar, metrics::RateModel::kPowerLaw,
                                                         "mean_dbar_norm_sq")));
    fits.push_back(FitJson(metrics::FitRateDefaultWindow(
        r.running_min_dbar, metrics::RateModel::kPowerLaw, "running_min_dbar")));
    if (r.has_delta_q() && r.delta_q_values().size() == r.rows()) {
      fits.push_back(FitJson(metrics::FitRateDefaultWindow(
          r.delta_q_values(), metrics::RateModel::kExponential, "delta_Q")));
    }
  }
  j["rate_fits"] = fits;

  json thr;
  thr["dbar_norm_sq"] = Thresholds(r.dbar_norm_sq, eps_list);
  if (r.has_delta_q() && r.delta_q_values().size() == r.rows()) {
    thr["delta_Q"] = Thresholds(r.delta_q_values(), eps_list);
  }
  j["rounds_to_threshold"] = thr;
  return j;
}

nlohmann::json RunSummary(const federation::TrajectoryLog& log) {
  using nlohmann::json;
  json j;
  j["tool"] = "fmoo";
  j["tool_version"] = kToolVersion;
  j["csv_schema_version"] = kRoundsCsvSchemaVersion;
  j["status"] = log.status == federation::RunStatus::kCompleted ? "completed" : "diverged";
  j["message"] = log.message;
  j["config"] = ToJson(log.config);
  j["metrics"] = MetricsSummary(ToSeries(log), log.config.threshold_eps);
  j["final_point"] = std::vector<double>(log.final_point.data(),
                                         log.final_point.data() + log.final_point.size());
  if (log.weighted_output) {
    j["weighted_output"] = {
        {"round", *log.weighted_output_round},
        {"point", std::vector<double>(log.weighted_output->data(),
                                      log.weighted_output->data() + log.weighted_output->size())}};
  } else {
    j["weighted_output"] = nullptr;
  }
  return j;
}

void WriteRunDirectory(const std::filesystem::path& dir, const federation::TrajectoryLog& log) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "rounds.csv", std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir / "rounds.csv").string());
    WriteRoundsCsv(os, ToSeries(log));
  }
  std::ofstream os(dir / "summary.json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  os << RunSummary(log).dump(2) << '\n';
}

}  // namespace fmoo
