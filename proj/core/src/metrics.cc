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

#include "fmoo/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fmoo/errors.h"

namespace fmoo::metrics {

double DbarNormSq(const SimplexWeights& lambda, const DirectionSet& true_gradients) {
  if (lambda.size() != true_gradients.objectives()) {
    throw NumericError("dbar: lambda size does not match objective count");
  }
  return (true_gradients.rows.transpose() * lambda.values()).squaredNorm();
}

double DbarNormSq(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem) {
  return DbarNormSq(lambda, problem.Gradients(x));
}

double DeltaQ(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem) {
  if (!problem.has_pareto_reference()) {
    throw NumericError("delta_Q: problem '" + problem.name() + "' has no Pareto reference");
  }
  if (lambda.size() != problem.objectives()) throw NumericError("delta_Q: lambda size mismatch");
  const ModelPoint x_star = problem.ParetoReference(lambda);
  double acc = 0.0;
  for (std::size_t s = 0; s < problem.objectives(); ++s) {
    if (lambda[s] > 0.0) acc += lambda[s] * problem.LossGap(s, x, x_star);
  }
  return std::max(acc, 0.0);
}

double LambdaDrift(const SimplexWeights& lambda, const DirectionSet& true_gradients,
                   const minnorm::Options& options) {
  const minnorm::Solution hat = minnorm::SolveMinNorm(true_gradients, options);
  return (lambda.values() - hat.lambda.values()).lpNorm<1>();
}

double LambdaDrift(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem,
                   const minnorm::Options& options) {
  return LambdaDrift(lambda, problem.Gradients(x), options);
}

RateFit FitRate(std::span<const double> series, long t_lo, long t_hi, RateModel model,
                std::string name) {
  if (t_lo < 1 || t_hi > static_cast<long>(series.size()) || t_hi < t_lo) {
    throw NumericError("fit_rate: window [" + std::to_string(t_lo) + ", " +
                       std::to_string(t_hi) + "] outside series of length " +
                       std::to_string(series.size()));
  }
  if (t_hi - t_lo + 1 < 5) throw NumericError("fit_rate: window shorter than 5 points");
  RateFit fit;
  fit.series = std::move(name);
  fit.model = model;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  const auto n = static_cast<std::size_t>(t_hi - t_lo + 1);
  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long t = t_lo + static_cast<long>(k);
    double y = series[static_cast<std::size_t>(t - 1)];
    if (!(y > 0.0)) {
      y = 1e-300;
      fit.clipped = true;
    }
    xs[k] = model == RateModel::kPowerLaw ? std::log(static_cast<double>(t)) : static_cast<double>(t);
    ys[k] = std::log(y);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / static_cast<double>(n));
  return fit;
}

RateFit FitRateDefaultWindow(std::span<const double> series, RateModel model, std::string name) {
  const long t_hi = static_cast<long>(series.size());
  const long t_lo = t_hi / 2 + 1;
  return FitRate(series, t_lo, t_hi, model, std::move(name));
}

std::optional<long> RoundsToThreshold(std::span<const double> series, double epsilon) {
  if (!(epsilon > 0.0)) throw NumericError("rounds_to_threshold: epsilon must be positive");
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] <= epsilon) return static_cast<long>(k + 1);
  }
  return std::nullopt;
}

std::vector<double> RunningMin(std::span<const double> series) {
  std::vector<double> out(series.size());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < series.size(); ++k) out[k] = m = std::min(m, series[k]);
  return out;
}

std::vector<double> RunningMean(std::span<const double> series) {
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    acc += series[k];
    out[k] = acc / static_cast<double>(k + 1);
  }
  return out;
}

const char* ToString(RateModel m) {
  return m == RateModel::kPowerLaw ? "power-law" : "exponential";
}

}  // namespace fmoo::metrics
