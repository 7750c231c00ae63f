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

#ifndef FMOO_MINNORM_H_
#define FMOO_MINNORM_H_

#include <cstddef>
#include <vector>

#include "fmoo/types.h"

namespace fmoo::minnorm {

enum class Termination { kGapBelowTol, kMaxIterations, kStalled, kClosedForm };

struct Options {
  double tol = 1e-10;
  std::size_t max_iter = 0;   // 0: 10*S*d + 1000
  bool record_trace = false;  // keep the objective after every iteration
};

// Min-norm point of the convex hull of the rows of G, with the simplex
// weights that produce it.
struct Solution {
  SimplexWeights lambda;
  Vector direction;
  double norm_sq = 0.0;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;  // closed form only: both inputs zero
  Termination termination = Termination::kGapBelowTol;
  std::vector<double> trace;
};

std::size_t DefaultMaxIter(std::size_t objectives, std::size_t dimension);

// Frank-Wolfe with away steps and exact line search over the simplex.
// The linear-minimization oracle takes the lowest index on ties.
// Throws NumericError on S = 0 or non-finite input. An exhausted
// iteration budget returns converged = false.
Solution SolveMinNorm(const Matrix& g, const Options& options = {});
inline Solution SolveMinNorm(const DirectionSet& g, const Options& options = {}) {
  return SolveMinNorm(g.rows, options);
}

// Exact solution for S = 2.
Solution ClosedFormTwo(const Vector& g1, const Vector& g2);

// 2 * max_s <v, v - G_s> with v = lambda^T G, clamped at zero.
double FrankWolfeGap(const Matrix& g, const SimplexWeights& lambda);

struct OracleResult {
  SimplexWeights lambda;
  double norm_sq = 0.0;
};

// Exhaustive search over the simplex lattice with spacing `step`. Test and
// verification use only. Throws NumericError when S > 4 or step is outside
// (0, 0.5].
OracleResult GridOracle(const Matrix& g, double step);
// Coarse lattice search followed by a fine lattice search restricted to
// the coarse minimizer's neighbourhood.
OracleResult GridOracleRefined(const Matrix& g, double coarse_step, double fine_step);

}  // namespace fmoo::minnorm

#endif  // FMOO_MINNORM_H_
