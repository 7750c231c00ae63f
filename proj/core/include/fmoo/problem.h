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

#ifndef FMOO_PROBLEM_H_
#define FMOO_PROBLEM_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmoo/indicator.h"
#include "fmoo/types.h"

namespace fmoo {

// Regularity constants of a suite. Bounds that cannot hold on all of R^d
// are reported for the ball ||x|| <= bound_radius.
struct ProblemConstants {
  double mu = 0.0;  // strong convexity modulus, 0 if none
  double smoothness = 0.0;  // L
  std::optional<double> gradient_bound;    // G, full local gradients
  std::optional<double> stochastic_bound;  // D, single-sample gradients
  double bound_radius = std::numeric_limits<double>::infinity();
};

// A federated multi-objective problem: objective s at client i is
// f_{s,i}; the global objective f_s is the (weighted) average of f_{s,i}
// over the owners R_s. Evaluators are const and thread-safe.
class Problem {
 public:
  Problem(IndicatorMatrix indicator, std::size_t dimension,
          std::vector<double> client_weights = {});
  virtual ~Problem() = default;

  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  std::size_t objectives() const { return indicator_.objectives(); }
  std::size_t clients() const { return indicator_.clients(); }
  std::size_t dimension() const { return dimension_; }
  const IndicatorMatrix& indicator() const { return indicator_; }
  bool balanced() const { return client_weights_.empty(); }
  // Weights over owners(s), in owner order, summing to one.
  const std::vector<double>& aggregation_weights(std::size_t s) const { return agg_weights_[s]; }

  virtual std::string name() const = 0;
  virtual ProblemConstants constants() const = 0;

  virtual double LocalLoss(std::size_t s, std::size_t client, const Vector& x) const = 0;
  virtual Vector LocalGradient(std::size_t s, std::size_t client, const Vector& x) const = 0;

  // Number of samples held by `client`; minibatches index into [0, n).
  virtual std::size_t ShardSize(std::size_t client) const = 0;
  // Average of per-sample gradients over `samples` (indices may repeat).
  // The uniform average over the shard equals LocalGradient.
  virtual Vector SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                                std::span<const std::size_t> samples) const = 0;

  double Loss(std::size_t s, const Vector& x) const;
  Vector Gradient(std::size_t s, const Vector& x) const;
  std::vector<double> Losses(const Vector& x) const;
  DirectionSet Gradients(const Vector& x) const;
  // f_s(x) - f_s(y); suites override with a cancellation-free form.
  virtual double LossGap(std::size_t s, const Vector& x, const Vector& y) const;

  // Minimizer of sum_s lambda_s f_s, if the suite can produce it.
  virtual bool has_pareto_reference() const { return false; }
  virtual ModelPoint ParetoReference(const SimplexWeights& lambda) const;

 protected:
  // Combines per-owner values in fixed owner order: the plain mean when
  // balanced, the weighted sum otherwise.
  template <typename F>
  auto Aggregate(std::size_t s, F&& per_client) const;

 private:
  IndicatorMatrix indicator_;
  std::size_t dimension_;
  std::vector<double> client_weights_;
  std::vector<std::vector<double>> agg_weights_;
};

// f_{s,i}(x) = (q_{s,i}/2) ||x - c_{s,i}||^2. Client centres are spread
// around the objective centre c_s with zero mean, so the owner average is
// c_s itself. Each client also holds zero-mean sample offsets xi_j; the
// per-sample gradient is q_{s,i} (x - c_{s,i} - xi_j).
struct QuadraticSuiteParams {
  std::size_t dimension = 2;
  std::vector<Vector> centers;   // S objective centres
  double curvature = 1.0;
  double curvature_spread = 0.0; // q_{s,i} = q (1 + spread * u), u in [-1, 1]
  double heterogeneity = 0.0;    // radius of client-centre spread
  double noise = 0.0;            // std of sample offsets
  std::size_t samples_per_client = 64;
  double bound_radius = 10.0;
  std::uint64_t seed = 0;
};

class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(IndicatorMatrix indicator, QuadraticSuiteParams params,
                   std::vector<double> client_weights = {});

  std::string name() const override { return "quadratic"; }
  ProblemConstants constants() const override;
  double LocalLoss(std::size_t s, std::size_t client, const Vector& x) const override;
  Vector LocalGradient(std::size_t s, std::size_t client, const Vector& x) const override;
  std::size_t ShardSize(std::size_t client) const override;
  Vector SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                        std::span<const std::size_t> samples) const override;
  double LossGap(std::size_t s, const Vector& x, const Vector& y) const override;

  bool has_pareto_reference() const override { return true; }
  ModelPoint ParetoReference(const SimplexWeights& lambda) const override;

  // Global f_s(x) = (qbar_s / 2) ||x - cbar_s||^2 + const.
  const Vector& global_center(std::size_t s) const { return global_centers_[s]; }
  double global_curvature(std::size_t s) const { return global_curvature_[s]; }
  const Vector& client_center(std::size_t s, std::size_t client) const;
  // All global centres coincide: the Pareto set is a single point.
  bool degenerate() const { return degenerate_; }

 private:
  QuadraticSuiteParams params_;
  // Indexed [s][client]; entries for non-owners are unused.
  std::vector<std::vector<Vector>> client_centers_;
  std::vector<std::vector<double>> client_curvature_;
  std::vector<std::vector<Vector>> offsets_;  // [client][j]
  std::vector<Vector> global_centers_;
  std::vector<double> global_curvature_;
  bool degenerate_ = false;
};

// f_{s,i}(x) = sum_j a_j tanh(<w_j, x> + b_j) + (rho/2) ||x||^2, with
// per-client perturbations of (a, w, b). Smooth, non-convex, bounded below
// by -sum_j |a_j|.
struct ToySuiteParams {
  std::size_t dimension = 2;
  std::size_t objectives = 2;
  std::size_t terms = 4;
  double rho = 0.05;
  double coefficient_scale = 1.0;
  double heterogeneity = 0.0;
  double noise = 0.0;
  std::size_t samples_per_client = 64;
  double bound_radius = 10.0;
  std::uint64_t seed = 0;
};

struct TanhTerm {
  double a = 0.0;
  Vector w;
  double b = 0.0;
};

class ToyNonconvexProblem final : public Problem {
 public:
  ToyNonconvexProblem(IndicatorMatrix indicator, ToySuiteParams params,
                      std::vector<double> client_weights = {});
  // Explicit terms, identical on every client owning s. No sample noise.
  ToyNonconvexProblem(IndicatorMatrix indicator, std::size_t dimension,
                      std::vector<std::vector<TanhTerm>> terms_per_objective, double rho);

  std::string name() const override { return "toy_nonconvex"; }
  ProblemConstants constants() const override;
  double LocalLoss(std::size_t s, std::size_t client, const Vector& x) const override;
  Vector LocalGradient(std::size_t s, std::size_t client, const Vector& x) const override;
  std::size_t ShardSize(std::size_t client) const override;
  Vector SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                        std::span<const std::size_t> samples) const override;

  const std::vector<TanhTerm>& terms(std::size_t s, std::size_t client) const;
  double rho() const { return params_.rho; }
  // -sum_j |a_j| over the client terms of objective s: a lower bound of f_s for rho >= 0.
  double LowerBound(std::size_t s) const;

 private:
  void ComputeConstants();

  ToySuiteParams params_;
  std::vector<std::vector<std::vector<TanhTerm>>> terms_;  // [s][client]
  std::vector<std::vector<std::vector<Vector>>> noise_;    // [s][client][j]
  double smoothness_ = 0.0;
  double tanh_gradient_bound_ = 0.0;
  double noise_bound_ = 0.0;
};

// Flat sample table: features include the constant bias column.
struct Dataset {
  Matrix features;      // n x d
  Matrix task_labels;   // n x S, entries 0 or 1
  std::vector<int> classes;  // n
  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

struct PartitionPlan {
  std::vector<std::vector<std::size_t>> shards;  // per client, ascending
  std::string skew;  // "iid" or "label-skew(k)"
  std::size_t labels_per_client = 0;  // 0 for iid
};

// Deterministic in `seed`. iid: shuffle and cut into near-equal blocks.
// label-skew(k): each client receives k label slots; every label's samples
// are split evenly across its slots. Throws ConfigError when infeasible.
PartitionPlan Partition(const std::vector<int>& labels, std::size_t clients,
                        bool label_skew, std::size_t labels_per_client, std::uint64_t seed);

struct ClassificationSuiteParams {
  std::size_t dimension = 5;  // includes the bias coordinate
  std::size_t objectives = 2;
  std::size_t classes = 10;
  std::size_t samples_per_client = 64;
  bool label_skew = false;
  std::size_t labels_per_client = 2;
  double regularization = 1e-2;
  double separation = 2.0;
  std::uint64_t seed = 0;
};

Dataset GenerateClassificationData(const ClassificationSuiteParams& params, std::size_t samples);

// S L2-regularised logistic regressions on a shared linear model.
class ClassificationProblem final : public Problem {
 public:
  ClassificationProblem(IndicatorMatrix indicator, ClassificationSuiteParams params,
                        std::vector<double> client_weights = {});
  ClassificationProblem(IndicatorMatrix indicator, ClassificationSuiteParams params,
                        Dataset data, std::vector<double> client_weights = {});

  std::string name() const override { return "classification"; }
  ProblemConstants constants() const override;
  double LocalLoss(std::size_t s, std::size_t client, const Vector& x) const override;
  Vector LocalGradient(std::size_t s, std::size_t client, const Vector& x) const override;
  std::size_t ShardSize(std::size_t client) const override;
  Vector SampleGradient(std::size_t s, std::size_t client, const Vector& x,
                        std::span<const std::size_t> samples) const override;

  bool has_pareto_reference() const override { return params_.regularization > 0.0; }
  // Newton's method on the lambda-scalarisation.
  ModelPoint ParetoReference(const SimplexWeights& lambda) const override;

  const Dataset& data() const { return data_; }
  const PartitionPlan& plan() const { return plan_; }

 private:
  void Setup();
  double SampleLoss(std::size_t s, std::size_t row, const Vector& x) const;
  // Accumulates the logistic-loss Hessian of f_s (without regulariser).
  void AddHessian(std::size_t s, double weight, const Vector& x, Matrix& h) const;

  ClassificationSuiteParams params_;
  Dataset data_;
  PartitionPlan plan_;
  double smoothness_ = 0.0;
  double max_feature_norm_ = 0.0;
};

}  // namespace fmoo

#endif  // FMOO_PROBLEM_H_
