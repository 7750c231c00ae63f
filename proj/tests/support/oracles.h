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

// Reference computations used by the tests. Written independently of the
// library so that agreement means something.

#ifndef FMOO_TESTS_ORACLES_H_
#define FMOO_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fmoo::testing {

// min ||sum_s l_s g_s||^2 over the simplex lattice of spacing 1/n for S <= 3,
// then a fine lattice of spacing 1/(10n) within one coarse cell of the best
// coarse point.
inline double LatticeMinNormSq(const Eigen::MatrixXd& g, int n = 100) {
  const Eigen::Index s = g.rows();
  auto value = [&](const Eigen::VectorXd& l) { return (g.transpose() * l).squaredNorm(); };
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_l(s);
  if (s == 1) return g.row(0).squaredNorm();
  auto scan = [&](double step, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd l(s);
    const int steps0 = static_cast<int>(std::lround((hi[0] - lo[0]) / step));
    for (int a = 0; a <= steps0; ++a) {
      l[0] = lo[0] + a * step;
      if (s == 2) {
        l[1] = 1.0 - l[0];
        if (l[1] < -1e-12) continue;
        const double v = value(l);
        if (v < best) best = v, best_l = l;
        continue;
      }
      const int steps1 = static_cast<int>(std::lround((hi[1] - lo[1]) / step));
      for (int b = 0; b <= steps1; ++b) {
        l[1] = lo[1] + b * step;
        l[2] = 1.0 - l[0] - l[1];
        if (l[2] < -1e-12 || l[0] < -1e-12 || l[1] < -1e-12) continue;
        const double v = value(l);
        if (v < best) best = v, best_l = l;
      }
    }
  };
  scan(1.0 / n, Eigen::VectorXd::Zero(s), Eigen::VectorXd::Ones(s));
  const double coarse = 1.0 / n;
  Eigen::VectorXd lo = (best_l.array() - coarse).max(0.0);
  Eigen::VectorXd hi = (best_l.array() + coarse).min(1.0);
  scan(coarse / 10.0, lo, hi);
  return best;
}

// Central differences, step h.
inline Eigen::VectorXd CentralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Normalised selection probabilities (1 - c)^(1 - t), t = 1..T.
inline std::vector<double> GeometricWeights(std::size_t rounds, double c) {
  std::vector<double> w(rounds);
  double total = 0.0;
  for (std::size_t t = 1; t <= rounds; ++t) {
    w[t - 1] = std::pow(1.0 - c, 1.0 - static_cast<double>(t));
    total += w[t - 1];
  }
  for (auto& v : w) v /= total;
  return w;
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline void WriteFile(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << text;
}

// A fresh empty directory under the system temp dir.
inline std::filesystem::path FreshDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fmoo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fmoo::testing

#endif  // FMOO_TESTS_ORACLES_H_
