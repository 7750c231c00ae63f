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

#ifndef FMOO_METRICS_H_
#define FMOO_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmoo/minnorm.h"
#include "fmoo/problem.h"
#include "fmoo/types.h"

namespace fmoo::metrics {

// ||lambda^T grad F(x)||^2 with exact full gradients.
double DbarNormSq(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem);
double DbarNormSq(const SimplexWeights& lambda, const DirectionSet& true_gradients);

// sum_s lambda_s [f_s(x) - f_s(x_*(lambda))]. Throws NumericError when the
// problem has no Pareto reference. Rounding noise below zero is clamped.
double DeltaQ(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem);

// ||lambda - lambda_hat||_1 where lambda_hat solves the QP on true gradients.
double LambdaDrift(const SimplexWeights& lambda, const ModelPoint& x, const Problem& problem,
                   const minnorm::Options& options = {});
double LambdaDrift(const SimplexWeights& lambda, const DirectionSet& true_gradients,
                   const minnorm::Options& options = {});

enum class RateModel { kPowerLaw, kExponential };

struct RateFit {
  std::string series;
  RateModel model = RateModel::kPowerLaw;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-space residuals
  long t_lo = 0;
  long t_hi = 0;
  bool clipped = false;   // some values were <= 0 and clipped to 1e-300
};

// Least squares of log y_t on log t (power law) or on t (exponential) over
// rounds [t_lo, t_hi], 1-based: series[t - 1] is round t.
// Throws NumericError for windows of fewer than 5 points or out of range.
RateFit FitRate(std::span<const double> series, long t_lo, long t_hi, RateModel model,
                std::string name = {});
// Second half of the series.
RateFit FitRateDefaultWindow(std::span<const double> series, RateModel model,
                             std::string name = {});

// First round t (1-based) with series_t <= epsilon.
std::optional<long> RoundsToThreshold(std::span<const double> series, double epsilon);

std::vector<double> RunningMin(std::span<const double> series);
std::vector<double> RunningMean(std::span<const double> series);

const char* ToString(RateModel m);

}  // namespace fmoo::metrics

#endif  // FMOO_METRICS_H_
