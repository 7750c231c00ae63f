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

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fmoo/cli.h"
#include "fmoo/output.h"

namespace fmoo::cli {

namespace fs = std::filesystem;

namespace {

struct LoadedRun {
  std::string id;
  RunSeries series;
  nlohmann::json metrics;
};

std::string RunId(const fs::path& dir) {
  fs::path p = dir.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

std::vector<double> EpsList(const fs::path& dir) {
  std::ifstream is(dir / "summary.json");
  if (!is) throw std::runtime_error("missing summary.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error&) {
    throw std::runtime_error("corrupt summary.json");
  }
  const auto& cfg = j.at("config");
  if (cfg.contains("threshold_eps")) return cfg.at("threshold_eps").get<std::vector<double>>();
  return ExperimentConfig{}.threshold_eps;
}

void WriteLong(std::ostream& os, const LoadedRun& run) {
  const RunSeries& r = run.series;
  auto row = [&](long t, const std::string& metric, double v) {
    os << run.id << ',' << t << ',' << metric << ',' << FormatDouble(v) << '\n';
  };
  for (std::size_t k = 0; k < r.rows(); ++k) {
    const long t = r.t[k];
    for (std::size_t s = 0; s < r.objectives; ++s) {
      row(t, "lambda_" + std::to_string(s + 1), r.lambda[s][k]);
    }
    row(t, "d_norm_sq", r.d_norm_sq[k]);
    row(t, "dbar_norm_sq", r.dbar_norm_sq[k]);
    row(t, "running_min_dbar", r.running_min_dbar[k]);
    for (std::size_t s = 0; s < r.objectives; ++s) {
      row(t, "loss_" + std::to_string(s + 1), r.loss[s][k]);
    }
    if (r.delta_q[k]) row(t, "delta_Q", *r.delta_q[k]);
    row(t, "fw_gap", r.fw_gap[k]);
    if (r.lambda_drift[k]) row(t, "lambda_drift", *r.lambda_drift[k]);
  }
}

std::string Cell(const nlohmann::json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) return FormatDouble(v.get<double>());
  return v.dump();
}

void WriteTable(std::ostream& os, const std::vector<LoadedRun>& runs) {
  char buf[256];
  os << "Rate fits\n";
  std::snprintf(buf, sizeof(buf), "%-28s %-22s %-11s %14s %14s %10s\n", "run", "series", "model",
                "slope", "residual", "window");
  os << buf;
  for (const auto& run : runs) {
    for (const auto& f : run.metrics.at("rate_fits")) {
      const std::string window = std::to_string(f.at("t_lo").get<long>()) + "-" +
                                 std::to_string(f.at("t_hi").get<long>());
      std::snprintf(buf, sizeof(buf), "%-28s %-22s %-11s %14.6g %14.6g %10s\n", run.id.c_str(),
                    f.at("series").get<std::string>().c_str(),
                    f.at("model").get<std::string>().c_str(), f.at("slope").get<double>(),
                    f.at("residual").get<double>(), window.c_str());
      os << buf;
    }
  }
  os << "\nRounds to threshold\n";
  std::snprintf(buf, sizeof(buf), "%-28s %-16s %-10s %10s\n", "run", "series", "eps", "rounds");
  os << buf;
  for (const auto& run : runs) {
    for (const auto& [series, by_eps] : run.metrics.at("rounds_to_threshold").items()) {
      for (const auto& [eps, n] : by_eps.items()) {
        std::snprintf(buf, sizeof(buf), "%-28s %-16s %-10s %10s\n", run.id.c_str(),
                      series.c_str(), eps.c_str(), Cell(n).c_str());
        os << buf;
      }
    }
  }
}

}  // namespace

int CmdReport(const std::vector<fs::path>& run_dirs, const fs::path& out_dir, std::ostream& out,
              std::ostream& err) {
  if (run_dirs.empty()) {
    err << "usage: report <run-dir>... (no run directories given)\n";
    return kExitUsage;
  }
  int code = kExitOk;
  std::vector<LoadedRun> runs;
  std::map<std::string, int> seen;
  for (const auto& dir : run_dirs) {
    try {
      std::ifstream is(dir / "rounds.csv");
      if (!is) throw std::runtime_error("missing rounds.csv");
      LoadedRun run;
      run.series = ReadRoundsCsv(is);
      run.metrics = MetricsSummary(run.series, EpsList(dir));
      run.id = RunId(dir);
      if (const int n = seen[run.id]++; n > 0) run.id += "#" + std::to_string(n + 1);
      runs.push_back(std::move(run));
    } catch (const std::exception& e) {
      err << "skipping " << dir.string() << ": " << e.what() << '\n';
      code = kExitError;
    }
  }
  if (runs.empty()) {
    err << "no readable runs\n";
    return kExitError;
  }

  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "report.csv", std::ios::trunc);
  std::ofstream txt(out_dir / "report.txt", std::ios::trunc);
  std::ofstream js(out_dir / "report.json", std::ios::trunc);
  if (!csv || !txt || !js) {
    err << "cannot write report files in " << out_dir.string() << '\n';
    return kExitError;
  }
  csv << "run_id,t,metric,value\n";
  nlohmann::json all = nlohmann::json::object();
  for (const auto& run : runs) {
    WriteLong(csv, run);
    all[run.id] = run.metrics;
  }
  js << all.dump(2) << '\n';
  std::ostringstream table;
  WriteTable(table, runs);
  txt << table.str();
  out << table.str();
  return code;
}

}  // namespace fmoo::cli
