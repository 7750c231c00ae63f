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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <thread>
#include <vector>

#include "cli_internal.h"
#include "fmoo/cli.h"
#include "fmoo/errors.h"
#include "fmoo/output.h"

namespace fmoo::cli {

namespace fs = std::filesystem;

const char* ToString(SweepAxis a) {
  switch (a) {
    case SweepAxis::kLocalSteps: return "K";
    case SweepAxis::kBatchSize: return "batch_size";
    case SweepAxis::kEtaLocal: return "eta_local";
    case SweepAxis::kClients: return "M";
    case SweepAxis::kHeterogeneity: return "heterogeneity";
  }
  return "?";
}

namespace {

std::size_t AsCount(double v, bool allow_zero, const std::string& path) {
  if (!std::isfinite(v) || v != std::floor(v) || v < (allow_zero ? 0.0 : 1.0)) {
    throw ConfigError(std::string("expected ") + (allow_zero ? "a non-negative" : "a positive") +
                          " integer, got " + FormatDouble(v),
                      path);
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig SweepSpec::Member(double v, std::optional<std::uint64_t> seed) const {
  ExperimentConfig c = base;
  const std::string path = "values";
  switch (axis) {
    case SweepAxis::kLocalSteps:
      c.local_steps = AsCount(v, false, path);
      break;
    case SweepAxis::kBatchSize:
      c.batch_size = AsCount(v, true, path);
      break;
    case SweepAxis::kEtaLocal:
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("eta_local must be >= 0", path);
      c.eta_local = v;
      break;
    case SweepAxis::kClients:
      if (c.indicator_kind == "explicit") {
        throw ConfigError("cannot sweep M with an explicit indicator", "axis");
      }
      if (!c.client_weights.empty()) {
        throw ConfigError("cannot sweep M with explicit client_weights", "axis");
      }
      c.clients = AsCount(v, false, path);
      RefreshIndicator(c);
      break;
    case SweepAxis::kHeterogeneity:
      if (c.problem.kind == ProblemKind::kClassification) {
        const std::size_t k = AsCount(v, true, path);
        c.problem.partition = k == 0 ? PartitionSkew::kIid : PartitionSkew::kLabelSkew;
        if (k > 0) c.problem.labels_per_client = static_cast<int>(k);
      } else {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("heterogeneity must be >= 0", path);
        c.problem.heterogeneity = v;
      }
      break;
  }
  if (seed) c.seed = *seed;
  Validate(c);
  return c;
}

std::string SweepSpec::RunName(SweepAxis axis, double v, std::optional<std::uint64_t> seed) {
  std::string name = std::string(ToString(axis)) + "_";
  name += (axis == SweepAxis::kBatchSize && v == 0.0) ? "full" : FormatDouble(v);
  if (seed) name += "_seed_" + std::to_string(*seed);
  return name;
}

SweepSpec ParseSweep(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be an object", "<root>");
  for (const auto& [key, _] : j.items()) {
    if (key != "base" && key != "axis" && key != "values" && key != "seeds") {
      throw ConfigError("unknown key", key);
    }
  }
  SweepSpec spec;
  if (!j.contains("base")) throw ConfigError("missing required key", "base");
  try {
    spec.base = ParseConfig(j.at("base"));
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), "base");
  }

  if (!j.contains("axis") || !j.at("axis").is_string()) {
    throw ConfigError("missing or non-string axis", "axis");
  }
  const std::string axis = j.at("axis").get<std::string>();
  bool found = false;
  for (SweepAxis a : {SweepAxis::kLocalSteps, SweepAxis::kBatchSize, SweepAxis::kEtaLocal,
                      SweepAxis::kClients, SweepAxis::kHeterogeneity}) {
    if (axis == ToString(a)) {
      spec.axis = a;
      found = true;
    }
  }
  if (!found) {
    throw ConfigError("unknown axis '" + axis + "' (K, batch_size, eta_local, M, heterogeneity)",
                      "axis");
  }

  if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty()) {
    throw ConfigError("values must be a nonempty array", "values");
  }
  const auto& values = j.at("values");
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::string path = "values[" + std::to_string(k) + "]";
    if (values[k].is_number()) {
      spec.values.push_back(values[k].get<double>());
    } else if (values[k].is_string() && values[k].get<std::string>() == "full" &&
               spec.axis == SweepAxis::kBatchSize) {
      spec.values.push_back(0.0);
    } else {
      throw ConfigError("expected a number", path);
    }
  }

  if (j.contains("seeds")) {
    const auto& seeds = j.at("seeds");
    if (!seeds.is_array()) throw ConfigError("seeds must be an array", "seeds");
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (!seeds[k].is_number_unsigned()) {
        throw ConfigError("expected a non-negative integer", "seeds[" + std::to_string(k) + "]");
      }
      spec.seeds.push_back(seeds[k].get<std::uint64_t>());
    }
  }

  // Every member must be valid before anything runs.
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    try {
      spec.Member(spec.values[k]);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), "values[" + std::to_string(k) + "]");
    }
  }
  return spec;
}

namespace {

struct MemberJob {
  MemberJob(double v, std::optional<std::uint64_t> s, std::string n)
      : value(v), seed(s), name(std::move(n)) {}

  double value = 0.0;
  std::optional<std::uint64_t> seed;
  std::string name;
  int exit_code = kExitOk;
  std::string out_text;
  std::string err_text;
};

nlohmann::json ResolveBase(nlohmann::json j, const fs::path& sweep_path) {
  if (j.contains("base") && j.at("base").is_string()) {
    fs::path p = j.at("base").get<std::string>();
    if (p.is_relative()) p = sweep_path.parent_path() / p;
    std::ifstream is(p);
    if (!is) throw ConfigError("cannot open " + p.string(), "base");
    try {
      j["base"] = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what(), "base");
    }
  }
  return j;
}

}  // namespace

int CmdSweep(const fs::path& sweep_path, const fs::path& out_dir, const RunOptions& options,
             std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  try {
    std::ifstream is(sweep_path);
    if (!is) throw ConfigError("cannot open " + sweep_path.string(), "<file>");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what(), "<file>");
    }
    spec = ParseSweep(ResolveBase(std::move(j), sweep_path));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (fs::exists(out_dir / "sweep_summary.json") && !options.force) {
    err << "refusing to overwrite existing sweep in " << out_dir.string() << " (use --force)\n";
    return kExitUsage;
  }

  std::vector<MemberJob> jobs;
  for (double v : spec.values) {
    if (spec.seeds.empty()) {
      jobs.emplace_back(v, std::nullopt, SweepSpec::RunName(spec.axis, v, std::nullopt));
    } else {
      for (std::uint64_t s : spec.seeds) {
        jobs.emplace_back(v, s, SweepSpec::RunName(spec.axis, v, s));
      }
    }
  }

  auto run_member = [&](MemberJob& job) {
    std::ostringstream o, e;
    const fs::path dir = out_dir / job.name;
    if (internal::HasRunOutputs(dir) && !options.force) {
      e << "refusing to overwrite existing run in " << dir.string() << " (use --force)\n";
      job.exit_code = kExitUsage;
    } else {
      try {
        RunOptions member_options = options;
        member_options.jobs = 1;
        job.exit_code = internal::ExecuteRun(spec.Member(job.value, job.seed), dir,
                                             member_options, o, e);
      } catch (const ConfigError& ex) {
        e << "config error: " << ex.what() << '\n';
        job.exit_code = kExitUsage;
      }
    }
    job.out_text = o.str();
    job.err_text = e.str();
  };

  // Members are independent; each run is deterministic, so the schedule
  // does not affect any output byte.
  const std::size_t workers = std::clamp<std::size_t>(options.jobs, 1, jobs.size());
  if (workers == 1) {
    for (auto& job : jobs) run_member(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) run_member(jobs[k]);
      });
    }
  }

  nlohmann::json summary;
  summary["tool_version"] = kToolVersion;
  summary["axis"] = ToString(spec.axis);
  summary["values"] = spec.values;
  summary["threshold_eps"] = spec.base.threshold_eps;
  nlohmann::json members = nlohmann::json::array();
  int worst = kExitOk;
  for (const auto& job : jobs) {
    out << job.out_text;
    err << job.err_text;
    worst = std::max(worst, job.exit_code);
    nlohmann::json m;
    m["run"] = job.name;
    m["value"] = job.value;
    m["seed"] = job.seed ? nlohmann::json(*job.seed) : nlohmann::json(spec.base.seed);
    m["exit_code"] = job.exit_code;
    const fs::path csv = out_dir / job.name / "rounds.csv";
    std::ifstream is(csv);
    if (is) {
      try {
        const auto metrics = MetricsSummary(ReadRoundsCsv(is), spec.base.threshold_eps);
        m["rounds_to_threshold"] = metrics.at("rounds_to_threshold");
        m["rate_fits"] = metrics.at("rate_fits");
        m["final"] = metrics.at("final");
        m["mean_dbar_norm_sq"] = metrics.value("mean_dbar_norm_sq", nlohmann::json(nullptr));
      } catch (const std::exception& ex) {
        err << job.name << ": cannot summarize: " << ex.what() << '\n';
        worst = std::max(worst, kExitError);
      }
    }
    members.push_back(std::move(m));
  }
  summary["members"] = std::move(members);

  fs::create_directories(out_dir);
  std::ofstream os(out_dir / "sweep_summary.json", std::ios::trunc);
  if (!os) {
    err << "cannot write " << (out_dir / "sweep_summary.json").string() << '\n';
    return kExitError;
  }
  os << summary.dump(2) << '\n';
  out << "sweep: " << jobs.size() << " runs, summary in "
      << (out_dir / "sweep_summary.json").string() << '\n';
  return worst;
}

}  // namespace fmoo::cli
