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

// fmoo: run, sweep, verify and report federated multi-objective experiments.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmoo/cli.h"
#include "fmoo/output.h"

int main(int argc, char** argv) {
  namespace cli = fmoo::cli;

  CLI::App app{"Federated multi-objective gradient descent simulator"};
  app.set_version_flag("--version", std::string("fmoo ") + fmoo::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out;
  bool force = false;
  std::size_t jobs = 1;

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory (default: $FMOO_OUTPUT_ROOT/<config name>)");
  run->add_flag("--force", force, "Overwrite an existing run directory");
  run->add_option("--jobs", jobs, "Client-update threads")->check(CLI::PositiveNumber);

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Run every member of a sweep spec");
  sweep->add_option("--config", sweep_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--out", out, "Sweep output directory");
  sweep->add_flag("--force", force, "Overwrite existing run directories");
  sweep->add_option("--jobs", jobs, "Sweep members run concurrently")
      ->check(CLI::PositiveNumber);

  std::string level = "quick";
  double inject_tol = 0.0;
  auto* verify = app.add_subcommand("verify", "Run the built-in verification battery");
  verify->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  auto* inject = verify->add_option("--inject-solver-tol", inject_tol,
                                    "Override the min-norm tolerance (testing only)");
  inject->group("");

  std::vector<std::string> run_dirs;
  auto* report = app.add_subcommand("report", "Merge run directories into a long-format report");
  report->add_option("dirs", run_dirs, "Run directories");
  report->add_option("--out", out, "Report output directory (default: .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (run->parsed()) {
    const auto dir = cli::ResolveOutputDir(
        out, std::filesystem::path(config_path).stem().string());
    return cli::CmdRun(config_path, dir, {force, jobs}, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    const auto dir = cli::ResolveOutputDir(
        out, std::filesystem::path(sweep_path).stem().string());
    return cli::CmdSweep(sweep_path, dir, {force, jobs}, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    cli::VerifyOptions options;
    options.level = level == "full" ? cli::VerifyLevel::kFull : cli::VerifyLevel::kQuick;
    if (inject->count() > 0) options.solver_tol_override = inject_tol;
    return cli::CmdVerify(options, std::cout);
  }
  std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
  return cli::CmdReport(dirs, out.empty() ? std::filesystem::path(".") : std::filesystem::path(out), std::cout,
                        std::cerr);
}
