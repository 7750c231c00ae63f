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

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fmoo/cli.h"
#include "fmoo/errors.h"
#include "fmoo/output.h"
#include "oracles.h"

namespace fmoo::cli {
namespace {

namespace fs = std::filesystem;
using testing::FreshDir;
using testing::ReadFile;
using testing::WriteFile;

constexpr const char* kQuadratic = R"({
  "clients": 3, "objectives": 2, "dimension": 4, "rounds": 25,
  "local_steps": 3, "eta_global": 0.2, "eta_local": 0.05, "seed": 9,
  "problem": {"type": "quadratic", "heterogeneity": 0.5}
})";

struct Captured {
  int code;
  std::string out, err;
};

Captured RunCli(const fs::path& config, const fs::path& dir, bool force = false,
             std::size_t jobs = 1) {
  std::ostringstream out, err;
  const int code = CmdRun(config, dir, {force, jobs}, out, err);
  return {code, out.str(), err.str()};
}

std::size_t LineCount(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 5e-324, 123456789.0,
                   std::numeric_limits<double>::max()}) {
    const std::string s = FormatDouble(v);
    EXPECT_EQ(ParseDouble(s), v) << s;
  }
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_THROW(ParseDouble("1.5x"), ConfigError);
}

TEST(RoundsCsv, HeaderSchema) {
  EXPECT_EQ(RoundsCsvHeader(2),
            "t,lambda_1,lambda_2,d_norm_sq,dbar_norm_sq,running_min_dbar,loss_1,loss_2,"
            "delta_Q,fw_gap,lambda_drift");
}

TEST(CmdRun, WritesOneRowPerRound) {
  const auto dir = FreshDir("run_rows");
  WriteFile(dir / "c.json", kQuadratic);
  const auto r = RunCli(dir / "c.json", dir / "out");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadFile(dir / "out" / "rounds.csv");
  EXPECT_EQ(LineCount(csv), 26u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), RoundsCsvHeader(2));

  const auto summary = nlohmann::json::parse(ReadFile(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("tool_version"), kToolVersion);
  EXPECT_EQ(summary.at("csv_schema_version"), kRoundsCsvSchemaVersion);
  EXPECT_EQ(summary.at("status"), "completed");
  EXPECT_EQ(summary.at("config").at("rounds"), 25);
  EXPECT_TRUE(summary.at("metrics").at("rounds_to_threshold").contains("delta_Q"));
  EXPECT_FALSE(summary.at("metrics").at("rate_fits").empty());
  EXPECT_TRUE(summary.at("weighted_output").is_object());
  EXPECT_EQ(summary.at("final_point").size(), 4u);
}

TEST(CmdRun, CsvParsesBackExactly) {
  const auto dir = FreshDir("run_parse");
  WriteFile(dir / "c.json", kQuadratic);
  ASSERT_EQ(RunCli(dir / "c.json", dir / "out").code, kExitOk);
  std::istringstream is(ReadFile(dir / "out" / "rounds.csv"));
  const auto series = ReadRoundsCsv(is);
  std::ostringstream os;
  WriteRoundsCsv(os, series);
  EXPECT_EQ(os.str(), ReadFile(dir / "out" / "rounds.csv"));
}

TEST(CmdRun, RepeatIsByteIdenticalAndNeedsForce) {
  const auto dir = FreshDir("run_repeat");
  WriteFile(dir / "c.json", kQuadratic);
  ASSERT_EQ(RunCli(dir / "c.json", dir / "out").code, kExitOk);
  const std::string csv = ReadFile(dir / "out" / "rounds.csv");
  const std::string json = ReadFile(dir / "out" / "summary.json");

  const auto refused = RunCli(dir / "c.json", dir / "out");
  EXPECT_EQ(refused.code, kExitUsage);
  EXPECT_NE(refused.err.find("--force"), std::string::npos);

  ASSERT_EQ(RunCli(dir / "c.json", dir / "out", true, 3).code, kExitOk);
  EXPECT_EQ(ReadFile(dir / "out" / "rounds.csv"), csv);
  EXPECT_EQ(ReadFile(dir / "out" / "summary.json"), json);
}

TEST(CmdRun, MalformedKeyExitsTwoNamingIt) {
  const auto dir = FreshDir("run_badkey");
  auto j = nlohmann::json::parse(kQuadratic);
  j["problem"]["hetrogeneity"] = 1.0;
  WriteFile(dir / "c.json", j.dump());
  const auto r = RunCli(dir / "c.json", dir / "out");
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("problem.hetrogeneity"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "rounds.csv"));

  WriteFile(dir / "broken.json", "{\"clients\": ");
  EXPECT_EQ(RunCli(dir / "broken.json", dir / "out").code, kExitUsage);
  EXPECT_EQ(RunCli(dir / "absent.json", dir / "out").code, kExitUsage);
}

TEST(CmdRun, DivergenceExitsThreeWithPartialLog) {
  const auto dir = FreshDir("run_diverge");
  auto j = nlohmann::json::parse(kQuadratic);
  j["eta_global"] = 40.0;
  j["local_steps"] = 1;
  j["rounds"] = 200;
  WriteFile(dir / "c.json", j.dump());
  const auto r = RunCli(dir / "c.json", dir / "out");
  EXPECT_EQ(r.code, kExitDiverged);
  const std::string csv = ReadFile(dir / "out" / "rounds.csv");
  EXPECT_GT(LineCount(csv), 1u);
  EXPECT_LT(LineCount(csv), 201u);
  const auto summary = nlohmann::json::parse(ReadFile(dir / "out" / "summary.json"));
  EXPECT_EQ(summary.at("status"), "diverged");
}

TEST(CmdRun, AbsentMetricsAreEmptyFields) {
  const auto dir = FreshDir("run_toy");
  WriteFile(dir / "c.json", R"({"clients": 2, "objectives": 2, "dimension": 3, "rounds": 4,
    "eta_global": 0.1, "problem": {"type": "toy_nonconvex"}})");
  ASSERT_EQ(RunCli(dir / "c.json", dir / "out").code, kExitOk);
  std::istringstream is(ReadFile(dir / "out" / "rounds.csv"));
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_NE(row.find(",,"), std::string::npos);  // delta_Q is empty
  const auto summary = nlohmann::json::parse(ReadFile(dir / "out" / "summary.json"));
  EXPECT_TRUE(summary.at("weighted_output").is_null());
}

TEST(ResolveOutputDir, ExplicitThenEnvironmentThenCwd) {
  EXPECT_EQ(ResolveOutputDir("x/y", "name"), fs::path("x/y"));
  ::setenv(kOutputRootEnv, "/tmp/root", 1);
  EXPECT_EQ(ResolveOutputDir("", "name"), fs::path("/tmp/root/name"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(ResolveOutputDir("", "name"), fs::path("name"));
}

nlohmann::json KSweep() {
  nlohmann::json base = nlohmann::json::parse(kQuadratic);
  base["rounds"] = 400;
  base["eta_global"] = 0.02;
  base["eta_local"] = 0.01;
  base["normalize_delta_by_K"] = false;
  base["initial_point"] = {3, 3, 3, 3};
  return {{"base", base}, {"axis", "K"}, {"values", {1, 5, 10}}};
}

TEST(ParseSweep, ValidatesEveryMember) {
  auto spec = KSweep();
  EXPECT_EQ(ParseSweep(spec).values.size(), 3u);
  spec["values"] = {1, 0};
  try {
    ParseSweep(spec);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "values[1]");
  }
  spec["values"] = nlohmann::json::array();
  EXPECT_THROW(ParseSweep(spec), ConfigError);
  spec = KSweep();
  spec["axis"] = "Q";
  EXPECT_THROW(ParseSweep(spec), ConfigError);
  spec = KSweep();
  spec["extra"] = 1;
  EXPECT_THROW(ParseSweep(spec), ConfigError);
}

TEST(SweepSpec, MemberAppliesTheAxis) {
  auto spec = ParseSweep(KSweep());
  EXPECT_EQ(spec.Member(5).local_steps, 5u);
  spec.axis = SweepAxis::kClients;
  const auto m = spec.Member(6, 44);
  EXPECT_EQ(m.clients, 6u);
  EXPECT_EQ(m.indicator.clients(), 6u);
  EXPECT_EQ(m.seed, 44u);
  spec.axis = SweepAxis::kHeterogeneity;
  EXPECT_EQ(spec.Member(2.5).problem.heterogeneity, 2.5);
  spec.axis = SweepAxis::kEtaLocal;
  EXPECT_EQ(spec.Member(1e-3).eta_local, 1e-3);
  EXPECT_EQ(SweepSpec::RunName(SweepAxis::kBatchSize, 0, std::nullopt), "batch_size_full");
  EXPECT_EQ(SweepSpec::RunName(SweepAxis::kLocalSteps, 5, 2), "K_5_seed_2");
}

TEST(CmdSweep, KSweepWritesRunsAndSummary) {
  const auto dir = FreshDir("sweep_k");
  WriteFile(dir / "sweep.json", KSweep().dump());
  std::ostringstream out, err;
  ASSERT_EQ(CmdSweep(dir / "sweep.json", dir / "out", {false, 2}, out, err), kExitOk) << err.str();
  for (const char* name : {"K_1", "K_5", "K_10"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / name / "rounds.csv")) << name;
  }
  const auto summary = nlohmann::json::parse(ReadFile(dir / "out" / "sweep_summary.json"));
  const auto& members = summary.at("members");
  ASSERT_EQ(members.size(), 3u);
  std::vector<long> counts;
  for (const auto& m : members) {
    EXPECT_FALSE(m.at("rate_fits").empty());
    counts.push_back(m.at("rounds_to_threshold").at("delta_Q").at("0.01").get<long>());
  }
  EXPECT_GT(counts[0], counts[1]);
  EXPECT_GT(counts[1], counts[2]);

  // The report derived from the run directories carries the same numbers.
  std::vector<fs::path> dirs;
  for (const auto& m : members) dirs.push_back(dir / "out" / m.at("run").get<std::string>());
  std::ostringstream rout, rerr;
  ASSERT_EQ(CmdReport(dirs, dir / "report", rout, rerr), kExitOk) << rerr.str();
  const auto report = nlohmann::json::parse(ReadFile(dir / "report" / "report.json"));
  for (const auto& m : members) {
    const auto& r = report.at(m.at("run").get<std::string>());
    EXPECT_EQ(r.at("rounds_to_threshold"), m.at("rounds_to_threshold"));
    EXPECT_EQ(r.at("rate_fits"), m.at("rate_fits"));
  }
}

TEST(CmdSweep, SerialAndParallelSweepsMatch) {
  const auto dir = FreshDir("sweep_par");
  auto spec = KSweep();
  spec["seeds"] = {1, 2};
  WriteFile(dir / "sweep.json", spec.dump());
  std::ostringstream out, err;
  ASSERT_EQ(CmdSweep(dir / "sweep.json", dir / "a", {false, 1}, out, err), kExitOk);
  ASSERT_EQ(CmdSweep(dir / "sweep.json", dir / "b", {false, 4}, out, err), kExitOk);
  EXPECT_EQ(ReadFile(dir / "a" / "sweep_summary.json"), ReadFile(dir / "b" / "sweep_summary.json"));
  EXPECT_EQ(ReadFile(dir / "a" / "K_5_seed_2" / "rounds.csv"),
            ReadFile(dir / "b" / "K_5_seed_2" / "rounds.csv"));
}

TEST(CmdSweep, FailedMemberIsRecordedAndSweepContinues) {
  const auto dir = FreshDir("sweep_fail");
  nlohmann::json base = nlohmann::json::parse(kQuadratic);
  base["local_steps"] = 1;
  nlohmann::json spec = {{"base", base}, {"axis", "eta_local"}, {"values", {0.01, 0.02}}};
  // An occupied member directory fails that member only.
  WriteFile(dir / "out" / "eta_local_0.02" / "rounds.csv", "occupied");
  WriteFile(dir / "sweep.json", spec.dump());
  std::ostringstream out, err;
  const int code = CmdSweep(dir / "sweep.json", dir / "out", {false, 1}, out, err);
  EXPECT_EQ(code, kExitUsage);
  const auto summary = nlohmann::json::parse(ReadFile(dir / "out" / "sweep_summary.json"));
  EXPECT_EQ(summary.at("members")[0].at("exit_code"), kExitOk);
  EXPECT_EQ(summary.at("members")[1].at("exit_code"), kExitUsage);
}

TEST(CmdSweep, BatchSweepAcceptsFull) {
  const auto dir = FreshDir("sweep_batch");
  nlohmann::json base = nlohmann::json::parse(kQuadratic);
  base["mode"] = "stochastic";
  base["problem"]["noise"] = 1.0;
  nlohmann::json spec = {{"base", base}, {"axis", "batch_size"}, {"values", {16, 64, "full"}}};
  WriteFile(dir / "sweep.json", spec.dump());
  std::ostringstream out, err;
  ASSERT_EQ(CmdSweep(dir / "sweep.json", dir / "out", {false, 1}, out, err), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "out" / "batch_size_full" / "summary.json"));
}

TEST(CmdReport, MergesRunsIntoOneLongCsv) {
  const auto dir = FreshDir("report_merge");
  WriteFile(dir / "c.json", kQuadratic);
  ASSERT_EQ(RunCli(dir / "c.json", dir / "alpha").code, kExitOk);
  ASSERT_EQ(RunCli(dir / "c.json", dir / "beta").code, kExitOk);
  std::ostringstream out, err;
  ASSERT_EQ(CmdReport({dir / "alpha", dir / "beta"}, dir / "rep", out, err), kExitOk);
  const std::string csv = ReadFile(dir / "rep" / "report.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "run_id,t,metric,value");
  EXPECT_NE(csv.find("\nalpha,1,delta_Q,"), std::string::npos);
  EXPECT_NE(csv.find("\nbeta,25,dbar_norm_sq,"), std::string::npos);
  EXPECT_NE(ReadFile(dir / "rep" / "report.txt").find("Rounds to threshold"), std::string::npos);
}

TEST(CmdReport, EmptyListIsUsageError) {
  std::ostringstream out, err;
  EXPECT_EQ(CmdReport({}, FreshDir("report_empty"), out, err), kExitUsage);
}

TEST(CmdReport, MissingRunIsNamedAndSkipped) {
  const auto dir = FreshDir("report_missing");
  WriteFile(dir / "c.json", kQuadratic);
  ASSERT_EQ(RunCli(dir / "c.json", dir / "good").code, kExitOk);
  WriteFile(dir / "corrupt" / "rounds.csv", "t,nonsense\n1,2\n");
  std::ostringstream out, err;
  const int code =
      CmdReport({dir / "good", dir / "nowhere", dir / "corrupt"}, dir / "rep", out, err);
  EXPECT_NE(code, kExitOk);
  EXPECT_NE(err.str().find("nowhere"), std::string::npos);
  EXPECT_NE(err.str().find("corrupt"), std::string::npos);
  EXPECT_NE(ReadFile(dir / "rep" / "report.csv").find("good,"), std::string::npos);
}

TEST(CmdVerify, QuickLevelPasses) {
  std::ostringstream out;
  EXPECT_EQ(CmdVerify({}, out), kExitOk) << out.str();
  for (const char* name : {"minnorm_vs_oracle", "closed_form_two", "gradient_fd", "unbiasedness",
                           "mgd_reduction", "descent_scan"}) {
    EXPECT_NE(out.str().find(name), std::string::npos) << name;
  }
}

TEST(CmdVerify, CorruptedToleranceFailsNamingTheSeed) {
  VerifyOptions options;
  options.solver_tol_override = 0.5;
  std::ostringstream out;
  EXPECT_EQ(CmdVerify(options, out), kExitVerifyFailed);
  const auto results = RunVerification(options);
  ASSERT_FALSE(results.empty());
  EXPECT_EQ(results[0].name, "minnorm_vs_oracle");
  EXPECT_FALSE(results[0].passed);
  EXPECT_NE(results[0].detail.find("seed="), std::string::npos);
}

TEST(CmdVerify, FullLevelAddsCertificates) {
  VerifyOptions options;
  options.level = VerifyLevel::kFull;
  const auto results = RunVerification(options);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  EXPECT_TRUE(all);
  EXPECT_EQ(results.back().name, "constant_certificates");
  const auto unbiased = std::find_if(results.begin(), results.end(),
                                     [](const CheckResult& r) { return r.name == "unbiasedness"; });
  EXPECT_NE(unbiased->detail.find("10000"), std::string::npos);
}

}  // namespace
}  // namespace fmoo::cli
