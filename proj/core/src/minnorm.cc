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

#include "fmoo/minnorm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "fmoo/errors.h"

namespace fmoo::minnorm {
namespace {

void CheckInput(const Matrix& g) {
  if (g.rows() == 0) throw NumericError("min-norm: direction set has no rows (S = 0)");
  if (!g.allFinite()) throw NumericError("min-norm: direction set has non-finite entries");
}

std::size_t ArgMin(const Vector& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

Solution Finish(const Matrix& g, const Vector& raw_lambda, double tol) {
  Solution out;
  out.lambda = SimplexWeights::Normalize(raw_lambda);
  out.direction = g.transpose() * out.lambda.values();
  out.norm_sq = out.direction.squaredNorm();
  out.fw_gap = FrankWolfeGap(g, out.lambda);
  out.converged = out.fw_gap <= tol;
  return out;
}

// Minimises ||g^T mu||^2 over the affine hull of the current support and
// moves lambda towards that point as far as the simplex allows, dropping a
// vertex whenever the segment leaves it. Returns true if lambda changed.
bool AffinePolish(const Matrix& gram, Vector& lambda) {
  bool moved = false;
  for (Eigen::Index round = 0; round < lambda.size(); ++round) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] > 0.0) support.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(support.size());
    if (n < 2) return moved;
    Matrix kkt = Matrix::Zero(n + 1, n + 1);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) kkt(a, b) = gram(support[a], support[b]);
      kkt(a, n) = 1.0;
      kkt(n, a) = 1.0;
    }
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite() || (kkt * sol - rhs).norm() > 1e-9 * (1.0 + kkt.norm())) return moved;

    Vector target = Vector::Zero(lambda.size());
    for (Eigen::Index a = 0; a < n; ++a) target[support[a]] = sol[a];
    const double before = lambda.dot(gram * lambda);
    double theta = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index a : support) {
      if (target[a] < 0.0) {
        const double t = lambda[a] / (lambda[a] - target[a]);
        if (t < theta) {
          theta = t;
          blocking = a;
        }
      }
    }
    Vector next = lambda + theta * (target - lambda);
    if (blocking >= 0) next[blocking] = 0.0;
    next = next.cwiseMax(0.0);
    next /= next.sum();
    if (!(next.dot(gram * next) < before)) return moved;
    lambda = next;
    moved = true;
    if (blocking < 0) return moved;
  }
  return moved;
}

}  // namespace

std::size_t DefaultMaxIter(std::size_t objectives, std::size_t dimension) {
  return 10 * objectives * dimension + 1000;
}

double FrankWolfeGap(const Matrix& g, const SimplexWeights& lambda) {
  if (static_cast<std::size_t>(g.rows()) != lambda.size()) {
    throw NumericError("fw gap: lambda size does not match direction count");
  }
  const Vector v = g.transpose() * lambda.values();
  const Vector gv = g * v;
  const double gap = 2.0 * (v.squaredNorm() - gv.minCoeff());
  return gap > 0.0 ? gap : 0.0;
}

Solution SolveMinNorm(const Matrix& g, const Options& options) {
  CheckInput(g);
  if (!(options.tol > 0.0)) throw NumericError("min-norm: tol must be positive");
  const auto s_count = static_cast<std::size_t>(g.rows());
  const auto d = static_cast<std::size_t>(g.cols());
  const std::size_t max_iter =
      options.max_iter ? options.max_iter : DefaultMaxIter(s_count, d);

  if (s_count == 1) {
    Solution out = Finish(g, Vector::Ones(1), options.tol);
    out.termination = Termination::kGapBelowTol;
    if (options.record_trace) out.trace.push_back(out.norm_sq);
    return out;
  }

  const Matrix gram = g * g.transpose();
  Vector lambda = Vector::Constant(g.rows(), 1.0 / static_cast<double>(s_count));
  std::vector<double> trace;
  Termination why = Termination::kMaxIterations;
  std::size_t iter = 0;
  for (;; ++iter) {
    const Vector v = g.transpose() * lambda;
    const double obj = v.squaredNorm();
    if (options.record_trace) trace.push_back(obj);
    const Vector gv = g * v;

    const std::size_t toward = ArgMin(gv);
    const double fw_gap = 2.0 * (obj - gv[static_cast<Eigen::Index>(toward)]);
    if (fw_gap <= options.tol) {
      why = Termination::kGapBelowTol;
      break;
    }
    if (iter >= max_iter) {
      why = Termination::kMaxIterations;
      break;
    }

    // Away vertex: worst member of the current support.
    std::size_t away = s_count;
    for (std::size_t s = 0; s < s_count; ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      if (lambda[si] > 0.0 && (away == s_count || gv[si] > gv[static_cast<Eigen::Index>(away)])) {
        away = s;
      }
    }
    const double away_gap = 2.0 * (gv[static_cast<Eigen::Index>(away)] - obj);

    Vector step_dir;  // change of v per unit step
    double gamma_max;
    const bool fw_step = fw_gap >= away_gap;
    if (fw_step) {
      step_dir = g.row(static_cast<Eigen::Index>(toward)).transpose() - v;
      gamma_max = 1.0;
    } else {
      const double la = lambda[static_cast<Eigen::Index>(away)];
      step_dir = v - g.row(static_cast<Eigen::Index>(away)).transpose();
      gamma_max = la / (1.0 - la);
    }
    // phi(gamma) = ||v + gamma * step_dir||^2 is a parabola in gamma.
    const double curv = step_dir.squaredNorm();
    const double slope = v.dot(step_dir);
    double gamma = curv > 0.0 ? -slope / curv : gamma_max;
    gamma = std::clamp(gamma, 0.0, gamma_max);
    if (gamma <= 0.0) {
      why = Termination::kStalled;
      break;
    }

    if (fw_step) {
      lambda *= (1.0 - gamma);
      lambda[static_cast<Eigen::Index>(toward)] += gamma;
    } else {
      lambda *= (1.0 + gamma);
      lambda[static_cast<Eigen::Index>(away)] -= gamma;
      if (gamma == gamma_max) lambda[static_cast<Eigen::Index>(away)] = 0.0;
    }
    AffinePolish(gram, lambda);
  }

  Solution out = Finish(g, lambda, options.tol);
  out.iterations = iter;
  out.termination = out.converged ? Termination::kGapBelowTol : why;
  if (why == Termination::kGapBelowTol && !out.converged) out.termination = Termination::kStalled;
  out.trace = std::move(trace);
  return out;
}

Solution ClosedFormTwo(const Vector& g1, const Vector& g2) {
  if (g1.size() != g2.size()) throw NumericError("closed form: dimension mismatch");
  if (!AllFinite(g1) || !AllFinite(g2)) throw NumericError("closed form: non-finite input");
  Matrix g(2, g1.size());
  g.row(0) = g1.transpose();
  g.row(1) = g2.transpose();

  const Vector diff = g1 - g2;
  const double dd = diff.squaredNorm();
  Vector lambda(2);
  bool degenerate = false;
  if (dd == 0.0) {
    lambda << 0.5, 0.5;
    degenerate = g1.squaredNorm() == 0.0;
  } else {
    const double l2 = std::clamp(g1.dot(diff) / dd, 0.0, 1.0);
    lambda << 1.0 - l2, l2;
  }
  Solution out = Finish(g, lambda, std::numeric_limits<double>::infinity());
  out.converged = true;
  out.degenerate = degenerate;
  out.termination = Termination::kClosedForm;
  return out;
}

namespace {

// Calls visit(counts) for every composition of `total` into counts.size()
// nonnegative parts with counts[k] in [lo[k], hi[k]] for all but the last.
template <typename F>
void ForEachComposition(std::vector<long>& counts, std::size_t pos, long remaining,
                        const std::vector<long>& lo, const std::vector<long>& hi, F& visit) {
  if (pos + 1 == counts.size()) {
    counts[pos] = remaining;
    visit(counts);
    return;
  }
  const long upper = std::min(remaining, hi[pos]);
  for (long c = lo[pos]; c <= upper; ++c) {
    counts[pos] = c;
    ForEachComposition(counts, pos + 1, remaining - c, lo, hi, visit);
  }
}

OracleResult SearchLattice(const Matrix& g, long n, const std::vector<long>& lo,
                           const std::vector<long>& hi) {
  const auto s_count = static_cast<std::size_t>(g.rows());
  std::vector<long> counts(s_count, 0);
  double best = std::numeric_limits<double>::infinity();
  Vector best_lambda;
  Vector lambda(g.rows());
  auto visit = [&](const std::vector<long>& c) {
    if (c.back() < 0) return;
    for (std::size_t s = 0; s < s_count; ++s) {
      lambda[static_cast<Eigen::Index>(s)] = static_cast<double>(c[s]) / static_cast<double>(n);
    }
    const double val = (g.transpose() * lambda).squaredNorm();
    if (val < best) {
      best = val;
      best_lambda = lambda;
    }
  };
  ForEachComposition(counts, 0, n, lo, hi, visit);
  OracleResult out;
  out.lambda = SimplexWeights::Normalize(best_lambda);
  out.norm_sq = best;
  return out;
}

long LatticeSize(double step) {
  if (!(step > 0.0) || step > 0.5) throw NumericError("grid oracle: step must lie in (0, 0.5]");
  return static_cast<long>(std::ceil(1.0 / step - 1e-9));
}

}  // namespace

OracleResult GridOracle(const Matrix& g, double step) {
  CheckInput(g);
  if (g.rows() > 4) throw NumericError("grid oracle: oracle limited to S <= 4");
  const long n = LatticeSize(step);
  const auto s_count = static_cast<std::size_t>(g.rows());
  return SearchLattice(g, n, std::vector<long>(s_count, 0), std::vector<long>(s_count, n));
}

OracleResult GridOracleRefined(const Matrix& g, double coarse_step, double fine_step) {
  const OracleResult coarse = GridOracle(g, coarse_step);
  const long n = LatticeSize(fine_step);
  const long radius = static_cast<long>(std::ceil(coarse_step * static_cast<double>(n)));
  const auto s_count = static_cast<std::size_t>(g.rows());
  std::vector<long> lo(s_count), hi(s_count);
  for (std::size_t s = 0; s < s_count; ++s) {
    const long centre = std::lround(coarse.lambda[s] * static_cast<double>(n));
    lo[s] = std::max(0L, centre - radius);
    hi[s] = std::min(n, centre + radius);
  }
  OracleResult fine = SearchLattice(g, n, lo, hi);
  return fine.norm_sq <= coarse.norm_sq ? fine : coarse;
}

}  // namespace fmoo::minnorm
