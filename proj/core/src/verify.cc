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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fmoo/cli.h"
#include "fmoo/federation.h"
#include "fmoo/mgd.h"
#include "fmoo/minnorm.h"
#include "fmoo/problem_factory.h"
#include "fmoo/random.h"

namespace fmoo::cli {

namespace {

constexpr std::uint64_t kVerifySeed = 0x5eedf00dULL;

RandomStream InstanceStream(std::uint32_t check, std::uint32_t instance) {
  return RandomStream(kVerifySeed, StreamDomain::kVerification, check, instance, 0, 0);
}

Vector RandomVector(RandomStream& rng, std::size_t d, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& e : v) e = scale * rng.Normal();
  return v;
}

ExperimentConfig SuiteConfig(ProblemKind kind, std::size_t clients, std::size_t objectives,
                             std::size_t dimension) {
  ExperimentConfig c;
  c.clients = clients;
  c.objectives = objectives;
  c.dimension = dimension;
  c.indicator_kind = "all-ones";
  c.problem.kind = kind;
  c.problem.noise = 0.0;
  c.seed = kVerifySeed;
  RefreshIndicator(c);
  return c;
}

std::vector<std::pair<std::string, ExperimentConfig>> NoisySuites() {
  auto quad = SuiteConfig(ProblemKind::kQuadratic, 3, 2, 4);
  quad.problem.noise = 0.5;
  quad.problem.heterogeneity = 0.5;
  auto toy = SuiteConfig(ProblemKind::kToyNonconvex, 3, 2, 4);
  toy.problem.noise = 0.5;
  toy.problem.heterogeneity = 0.3;
  auto cls = SuiteConfig(ProblemKind::kClassification, 3, 2, 5);
  return {{"quadratic", quad}, {"toy_nonconvex", toy}, {"classification", cls}};
}

CheckResult Fail(std::string name, std::string detail) {
  return {std::move(name), false, std::move(detail), 0.0};
}

CheckResult MinNormVsOracle(const VerifyOptions& opt) {
  minnorm::Options solver;
  if (opt.solver_tol_override) solver.tol = *opt.solver_tol_override;
  if (opt.solver_max_iter_override) solver.max_iter = *opt.solver_max_iter_override;
  for (std::uint32_t k = 0; k < 200; ++k) {
    RandomStream rng = InstanceStream(1, k);
    const std::size_t s = 2 + rng.UniformIndex(2);
    const std::size_t d = 2 + rng.UniformIndex(4);
    Matrix g(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = 2.0 * rng.Uniform() - 1.0;
    }
    const auto sol = minnorm::SolveMinNorm(g, solver);
    const auto oracle = minnorm::GridOracleRefined(g, 1e-2, 1e-3);
    if (sol.norm_sq > oracle.norm_sq + 1e-4) {
      std::ostringstream os;
      os << "seed=" << k << " S=" << s << " d=" << d << ": norm_sq " << sol.norm_sq
         << " exceeds oracle " << oracle.norm_sq << " + 1e-4";
      return Fail("minnorm_vs_oracle", os.str());
    }
    if (sol.converged && sol.fw_gap > 1e-8) {
      std::ostringstream os;
      os << "seed=" << k << " S=" << s << " d=" << d << ": converged with fw_gap "
         << sol.fw_gap;
      return Fail("minnorm_vs_oracle", os.str());
    }
  }
  return {"minnorm_vs_oracle", true, "200 instances", 0.0};
}

CheckResult ClosedFormAgreement(const VerifyOptions&) {
  for (std::uint32_t k = 0; k < 100; ++k) {
    RandomStream rng = InstanceStream(2, k);
    const Vector g1 = RandomVector(rng, 5, 1.0);
    const Vector g2 = RandomVector(rng, 5, 1.0);
    Matrix g(2, 5);
    g.row(0) = g1.transpose();
    g.row(1) = g2.transpose();
    const double closed = minnorm::ClosedFormTwo(g1, g2).norm_sq;
    const double iterative = minnorm::SolveMinNorm(g).norm_sq;
    if (std::abs(closed - iterative) > 1e-8) {
      std::ostringstream os;
      os << "seed=" << k << ": closed form " << closed << " vs solver " << iterative;
      return Fail("closed_form_two", os.str());
    }
  }
  return {"closed_form_two", true, "100 pairs in R^5", 0.0};
}

CheckResult GradientFiniteDifference(const VerifyOptions&) {
  constexpr double kStep = 1e-6;
  auto suites = NoisySuites();
  for (std::size_t q = 0; q < suites.size(); ++q) {
    const auto problem = MakeProblem(suites[q].second);
    const std::size_t d = problem->dimension();
    for (std::uint32_t k = 0; k < 50; ++k) {
      RandomStream rng = InstanceStream(3, static_cast<std::uint32_t>(100 * q + k));
      const Vector x = RandomVector(rng, d, 1.5);
      for (std::size_t s = 0; s < problem->objectives(); ++s) {
        for (std::size_t i : problem->indicator().owners(s)) {
          const Vector g = problem->LocalGradient(s, i, x);
          Vector fd(static_cast<Eigen::Index>(d));
          for (Eigen::Index j = 0; j < fd.size(); ++j) {
            Vector xp = x, xm = x;
            xp[j] += kStep;
            xm[j] -= kStep;
            fd[j] = (problem->LocalLoss(s, i, xp) - problem->LocalLoss(s, i, xm)) / (2 * kStep);
          }
          const double rel = (fd - g).norm() / std::max(1.0, g.norm());
          if (!(rel <= 1e-5)) {
            std::ostringstream os;
            os << suites[q].first << " seed=" << 100 * q + k << " s=" << s << " client=" << i
               << ": relative error " << rel;
            return Fail("gradient_fd", os.str());
          }
        }
      }
    }
  }
  return {"gradient_fd", true, "3 suites x 50 points", 0.0};
}

CheckResult Unbiasedness(const VerifyOptions& opt) {
  const std::size_t draws = opt.level == VerifyLevel::kFull ? 10000 : 2000;
  constexpr std::size_t kBatch = 4;
  auto suites = NoisySuites();
  for (std::size_t q = 0; q < suites.size(); ++q) {
    const auto problem = MakeProblem(suites[q].second);
    RandomStream rng = InstanceStream(4, static_cast<std::uint32_t>(q));
    const Vector x = RandomVector(rng, problem->dimension(), 1.0);
    Vector u = RandomVector(rng, problem->dimension(), 1.0);
    u /= u.norm();
    const std::size_t client = 0;
    const auto objectives = problem->indicator().objectives_of(client);
    std::vector<double> sum(objectives.size(), 0.0), sum_sq(objectives.size(), 0.0);
    for (std::size_t n = 0; n < draws; ++n) {
      const auto out = federation::ClientUpdateStochastic(
          *problem, x, client, 1, 0.0, kBatch, SampleSharing::kPerClient, kVerifySeed + q,
          static_cast<long>(n + 1));
      for (std::size_t k = 0; k < objectives.size(); ++k) {
        const double z = out.deltas[k].dot(u);
        sum[k] += z;
        sum_sq[k] += z * z;
      }
    }
    for (std::size_t k = 0; k < objectives.size(); ++k) {
      const double n = static_cast<double>(draws);
      const double mean = sum[k] / n;
      const double var = std::max(0.0, (sum_sq[k] - n * mean * mean) / (n - 1));
      const double se = std::sqrt(var / n);
      const double truth = problem->LocalGradient(objectives[k], client, x).dot(u);
      if (std::abs(mean - truth) > 3.0 * se) {
        std::ostringstream os;
        os << suites[q].first << " seed=" << q << " s=" << objectives[k] << ": mean " << mean
           << " vs exact " << truth << " (3 SE = " << 3.0 * se << ")";
        return Fail("unbiasedness", os.str());
      }
    }
  }
  return {"unbiasedness", true, std::to_string(draws) + " minibatch draws per suite", 0.0};
}

CheckResult MgdReduction(const VerifyOptions&) {
  for (ProblemKind kind : {ProblemKind::kQuadratic, ProblemKind::kToyNonconvex}) {
    auto c = SuiteConfig(kind, 1, 2, 5);
    c.rounds = 100;
    c.local_steps = 1;
    c.eta_global = 0.1;
    c.eta_local = 0.05;
    c.snapshot_every = 1;
    c.initial_point.assign(5, 1.0);
    const auto problem = MakeProblem(c);
    const auto log = federation::RunExperiment(c, *problem);
    minnorm::Options solver;
    solver.tol = c.minnorm_tol;
    solver.max_iter = c.EffectiveMaxIter();
    const auto path = CentralizedMgd(*problem, federation::InitialPoint(c), c.eta_global,
                                     c.rounds, solver);
    for (std::size_t t = 0; t < log.rounds.size(); ++t) {
      const auto& snap = log.rounds[t].x_snapshot;
      if (!snap || *snap != path[t]) {
        return Fail("mgd_reduction", std::string(ToString(kind)) + " seed=" +
                                         std::to_string(c.seed) + ": iterate " +
                                         std::to_string(t + 1) + " differs");
      }
    }
    if (log.final_point != path.back()) {
      return Fail("mgd_reduction", std::string(ToString(kind)) + ": final iterate differs");
    }
  }
  return {"mgd_reduction", true, "quadratic and toy, 100 rounds, bit-identical", 0.0};
}

CheckResult DescentScan(const VerifyOptions&) {
  for (ProblemKind kind : {ProblemKind::kQuadratic, ProblemKind::kToyNonconvex}) {
    auto c = SuiteConfig(kind, 1, 2, 5);
    c.rounds = 200;
    c.local_steps = 1;
    c.initial_point.assign(5, 2.0);
    const auto problem = MakeProblem(c);
    c.eta_global = 3.0 / (2.0 * (1.0 + problem->constants().smoothness));
    const auto log = federation::RunExperiment(c, *problem);
    std::vector<std::vector<double>> losses;
    for (const auto& r : log.rounds) losses.push_back(r.losses);
    losses.push_back(problem->Losses(log.final_point));
    for (std::size_t t = 0; t + 1 < losses.size(); ++t) {
      for (std::size_t s = 0; s < losses[t].size(); ++s) {
        if (losses[t + 1][s] > losses[t][s] + 1e-12) {
          std::ostringstream os;
          os << ToString(kind) << " seed=" << c.seed << " t=" << t + 1 << " s=" << s
             << ": f rose by " << losses[t + 1][s] - losses[t][s];
          return Fail("descent_scan", os.str());
        }
      }
    }
  }
  return {"descent_scan", true, "quadratic and toy, 200 rounds", 0.0};
}

CheckResult ConstantCertificates(const VerifyOptions&) {
  constexpr std::size_t kPairs = 10000;
  auto suites = NoisySuites();
  suites[0].second.problem.curvature_spread = 0.3;
  for (std::size_t q = 0; q < suites.size(); ++q) {
    const auto problem = MakeProblem(suites[q].second);
    const ProblemConstants k = problem->constants();
    const double radius = std::isfinite(k.bound_radius) ? k.bound_radius : 10.0;
    const std::size_t d = problem->dimension();
    RandomStream rng = InstanceStream(7, static_cast<std::uint32_t>(q));
    auto in_ball = [&] {
      Vector v = RandomVector(rng, d, 1.0);
      return Vector(v * (radius * std::pow(rng.Uniform(), 1.0 / static_cast<double>(d)) /
                         std::max(v.norm(), 1e-300)));
    };
    for (std::size_t n = 0; n < kPairs; ++n) {
      const Vector x = in_ball(), y = in_ball();
      const std::size_t s = rng.UniformIndex(problem->objectives());
      const auto& owners = problem->indicator().owners(s);
      const std::size_t i = owners[rng.UniformIndex(owners.size())];
      const Vector gx = problem->LocalGradient(s, i, x);
      const Vector gy = problem->LocalGradient(s, i, y);
      const double dist = (x - y).norm();
      std::string bad;
      if ((gx - gy).norm() > k.smoothness * dist * (1 + 1e-9) + 1e-12) bad = "smoothness";
      if (k.mu > 0.0 && (gx - gy).dot(x - y) < k.mu * dist * dist * (1 - 1e-9) - 1e-12) {
        bad = "strong convexity";
      }
      if (k.gradient_bound && gx.norm() > *k.gradient_bound * (1 + 1e-9)) bad = "gradient bound";
      if (k.stochastic_bound) {
        const std::size_t j = rng.UniformIndex(problem->ShardSize(i));
        const Vector gj = problem->SampleGradient(s, i, x, std::span<const std::size_t>(&j, 1));
        if (gj.norm() > *k.stochastic_bound * (1 + 1e-9)) bad = "stochastic bound";
      }
      if (!bad.empty()) {
        return Fail("constant_certificates", suites[q].first + " seed=" + std::to_string(n) +
                                                 ": " + bad + " violated");
      }
    }
    if (problem->has_pareto_reference()) {
      for (std::uint32_t n = 0; n < 20; ++n) {
        Vector w(static_cast<Eigen::Index>(problem->objectives()));
        for (auto& e : w) e = rng.UniformOpen();
        const SimplexWeights lambda = SimplexWeights::Normalize(w);
        const ModelPoint x = problem->ParetoReference(lambda);
        const DirectionSet g = problem->Gradients(x);
        const Vector v = g.rows.transpose() * lambda.values();
        if (v.norm() > 1e-8) {
          return Fail("constant_certificates", suites[q].first + " seed=" + std::to_string(n) +
                                                   ": Pareto reference not stationary (" +
                                                   std::to_string(v.norm()) + ")");
        }
      }
    }
  }
  return {"constant_certificates", true, "10^4 pairs per suite", 0.0};
}

}  // namespace

std::vector<CheckResult> RunVerification(const VerifyOptions& options) {
  using Check = std::function<CheckResult(const VerifyOptions&)>;
  std::vector<std::pair<const char*, Check>> checks = {
      {"minnorm_vs_oracle", MinNormVsOracle}, {"closed_form_two", ClosedFormAgreement},
      {"gradient_fd", GradientFiniteDifference}, {"unbiasedness", Unbiasedness},
      {"mgd_reduction", MgdReduction}, {"descent_scan", DescentScan}};
  if (options.level == VerifyLevel::kFull) {
    checks.emplace_back("constant_certificates", ConstantCertificates);
  }
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = check(options);
    } catch (const std::exception& e) {
      r = Fail(name, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

int CmdVerify(const VerifyOptions& options, std::ostream& out) {
  const auto results = RunVerification(options);
  bool all = true;
  char buf[128];
  for (const auto& r : results) {
    all = all && r.passed;
    std::snprintf(buf, sizeof(buf), "%-24s %-5s %8.2fs  ", r.name.c_str(),
                  r.passed ? "PASS" : "FAIL", r.seconds);
    out << buf << r.detail << '\n';
  }
  out << (all ? "all checks passed\n" : "verification FAILED\n");
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace fmoo::cli
