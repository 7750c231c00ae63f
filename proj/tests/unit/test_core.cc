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
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "fmoo/config.h"
#include "fmoo/errors.h"
#include "fmoo/indicator.h"
#include "fmoo/random.h"
#include "fmoo/types.h"

namespace fmoo {
namespace {

using Owners = std::vector<std::vector<std::size_t>>;

TEST(IndicatorMatrix, IdentityGivesOneObjectivePerClient) {
  const auto a = IndicatorMatrix::Identity(3);
  EXPECT_EQ(DeriveOwnerSets(a), (Owners{{0}, {1}, {2}}));
  EXPECT_EQ(a.objectives_of(1), (std::vector<std::size_t>{1}));
}

TEST(IndicatorMatrix, AllOnesSharesEveryObjective) {
  const auto a = IndicatorMatrix::AllOnes(2, 3);
  EXPECT_EQ(DeriveOwnerSets(a), (Owners{{0, 1, 2}, {0, 1, 2}}));
}

TEST(IndicatorMatrix, ExplicitMatrixReadsOffOwners) {
  const IndicatorMatrix a({{1, 1, 0}, {0, 1, 1}});
  EXPECT_EQ(a.owners(0), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(a.owners(1), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(a.objectives_of(1), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(a.at(0, 1));
  EXPECT_FALSE(a.at(1, 0));
}

TEST(IndicatorMatrix, EmptyRowNamesTheObjective) {
  try {
    IndicatorMatrix({{1, 1}, {0, 0}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "indicator[1]");
  }
}

TEST(IndicatorMatrix, EmptyColumnNamesTheClient) {
  try {
    IndicatorMatrix({{1, 0, 1}, {1, 0, 0}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "indicator[*][1]");
  }
}

TEST(IndicatorMatrix, RejectsNonBinaryAndRagged) {
  EXPECT_THROW(IndicatorMatrix({{1, 2}}), ConfigError);
  EXPECT_THROW(IndicatorMatrix({{1, 1}, {1}}), ConfigError);
  EXPECT_THROW(IndicatorMatrix(std::vector<std::vector<int>>{}), ConfigError);
}

TEST(SimplexWeights, NormalizeMeetsInvariants) {
  Vector raw(3);
  raw << 0.2, -1e-17, 0.7;
  const auto w = SimplexWeights::Normalize(raw);
  EXPECT_GE(w[1], 0.0);
  EXPECT_NEAR(w.values().sum(), 1.0, 1e-12);
  EXPECT_THROW(SimplexWeights::Normalize(Vector::Zero(2)), NumericError);
  EXPECT_THROW(SimplexWeights::Normalize(Vector()), NumericError);
}

TEST(SimplexWeights, UniformAndVertex) {
  EXPECT_DOUBLE_EQ(SimplexWeights::Uniform(4)[2], 0.25);
  const auto v = SimplexWeights::Vertex(3, 2);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[2], 1.0);
}

TEST(Philox, MatchesPublishedKnownAnswer) {
  // Random123 known-answer vector for philox4x32-10, all-ones input.
  Philox4x32::Counter ctr = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
  Philox4x32::Key key = {0xffffffffu, 0xffffffffu};
  const auto out = Philox4x32::Generate(ctr, key);
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);

  const auto pi = Philox4x32::Generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi[0], 0xd16cfe09u);
  EXPECT_EQ(pi[1], 0x94fdccebu);
  EXPECT_EQ(pi[2], 0x5001e420u);
  EXPECT_EQ(pi[3], 0x24126ea1u);
}

TEST(ClientStream, SameAddressSameSequence) {
  auto a = ClientStream(7, 1, 0, 0);
  auto b = ClientStream(7, 1, 0, 0);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(ClientStream, DistinctAddressesAreUncorrelated) {
  const std::vector<std::vector<std::size_t>> addresses = {
      {1, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 0, 1}};
  std::vector<std::vector<double>> draws;
  for (const auto& addr : addresses) {
    auto s = ClientStream(7, addr[0], addr[1], addr[2]);
    std::vector<double> v(1000);
    for (auto& x : v) x = s.Uniform();
    draws.push_back(v);
  }
  auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) mx += x[k] / n, my += y[k] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      sxy += (x[k] - mx) * (y[k] - my);
      sxx += (x[k] - mx) * (x[k] - mx);
      syy += (y[k] - my) * (y[k] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  for (std::size_t a = 0; a < draws.size(); ++a) {
    for (std::size_t b = a + 1; b < draws.size(); ++b) {
      EXPECT_NE(draws[a], draws[b]);
      EXPECT_LT(std::abs(corr(draws[a], draws[b])), 0.1) << a << " vs " << b;
    }
  }
}

TEST(RandomStream, CopyForks) {
  RandomStream a(3, StreamDomain::kVerification, 0, 0, 0, 0);
  a.NextU32();
  RandomStream b = a;
  for (int k = 0; k < 50; ++k) ASSERT_EQ(a.Normal(), b.Normal());
}

TEST(RandomStream, DomainsAreSeparate) {
  RandomStream a(3, StreamDomain::kClientSampling, 0, 0, 0, 0);
  RandomStream b(3, StreamDomain::kProblemGeneration, 0, 0, 0, 0);
  EXPECT_NE(a.NextU64(), b.NextU64());
}

TEST(RandomStream, DistributionMoments) {
  RandomStream s(11, StreamDomain::kVerification, 0, 0, 0, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  std::vector<int> counts(7, 0);
  for (int k = 0; k < n; ++k) {
    const double u = s.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.Normal();
    sn += z;
    sn2 += z * z;
    ++counts[s.UniformIndex(7)];
    const double o = s.UniformOpen();
    ASSERT_GT(o, 0.0);
    ASSERT_LE(o, 1.0);
  }
  EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4 * std::sqrt(n / 7.0));
}

nlohmann::json MinimalConfig() {
  return nlohmann::json::parse(R"({
    "clients": 3, "objectives": 2, "dimension": 4, "rounds": 5, "eta_global": 0.1,
    "problem": {"type": "quadratic"}
  })");
}

TEST(Config, MinimalConfigTakesDefaults) {
  const auto c = ParseConfig(MinimalConfig());
  EXPECT_EQ(c.clients, 3u);
  EXPECT_EQ(c.local_steps, 1u);
  EXPECT_EQ(c.mode, GradientMode::kFull);
  EXPECT_TRUE(c.normalize_delta_by_k);
  EXPECT_EQ(c.sample_sharing, SampleSharing::kPerClient);
  EXPECT_EQ(c.indicator.owners(1), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(c.minnorm_tol, 1e-10);
  EXPECT_EQ(c.EffectiveMaxIter(), 10u * 2 * 4 + 1000);
  EXPECT_EQ(c.threshold_eps, (std::vector<double>{1e-1, 1e-2, 1e-3}));
}

TEST(Config, EchoRoundTrips) {
  auto j = MinimalConfig();
  j["indicator"] = {{1, 1, 0}, {0, 1, 1}};
  j["mode"] = "stochastic";
  j["batch_size"] = 8;
  j["seed"] = 18446744073709551615ull;
  j["sample_sharing"] = "per-objective";
  j["normalize_delta_by_K"] = false;
  j["problem"]["curvature_spread"] = 0.25;
  const auto c = ParseConfig(j);
  EXPECT_EQ(ToJson(ParseConfig(ToJson(c))), ToJson(c));
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(ToJson(c).at("batch_size"), 8);
}

TEST(Config, UnknownKeyIsAnErrorNamingIt) {
  auto j = MinimalConfig();
  j["problem"]["curvture"] = 1.0;
  try {
    ParseConfig(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "problem.curvture");
  }
  j = MinimalConfig();
  j["rounds_"] = 1;
  try {
    ParseConfig(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "rounds_");
  }
}

TEST(Config, MissingRequiredKey) {
  auto j = MinimalConfig();
  j.erase("eta_global");
  try {
    ParseConfig(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "eta_global");
  }
}

TEST(Config, InvariantViolationsNameTheField) {
  auto check = [](nlohmann::json j, const std::string& path) {
    try {
      ParseConfig(j);
      ADD_FAILURE() << "no error for " << path;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.path(), path);
    }
  };
  auto j = MinimalConfig();
  j["local_steps"] = 0;
  check(j, "local_steps");
  j = MinimalConfig();
  j["eta_global"] = 0.0;
  check(j, "eta_global");
  j = MinimalConfig();
  j["eta_local"] = -1.0;
  check(j, "eta_local");
  j = MinimalConfig();
  j["batch_size"] = 0;
  check(j, "batch_size");
  j = MinimalConfig();
  j["rounds"] = 0;
  check(j, "rounds");
  j = MinimalConfig();
  j["indicator"] = {{1, 0, 0}, {0, 1, 0}};
  check(j, "indicator[*][2]");
  j = MinimalConfig();
  j["indicator"] = "identity";
  check(j, "indicator");
  j = MinimalConfig();
  j["mode"] = "stochastic";
  j["batch_size"] = 65;
  check(j, "batch_size");
}

TEST(Config, FullModeIgnoresBatchSize) {
  auto j = MinimalConfig();
  j["batch_size"] = 1000;
  EXPECT_NO_THROW(ParseConfig(j));
}

TEST(Config, RefreshIndicatorFollowsCounts) {
  auto c = ParseConfig(MinimalConfig());
  c.clients = 5;
  RefreshIndicator(c);
  EXPECT_EQ(c.indicator.clients(), 5u);
  EXPECT_NO_THROW(Validate(c));
}

}  // namespace
}  // namespace fmoo
