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

#include "fmoo/problem_factory.h"

#include <string>

#include "fmoo/dataset_io.h"
#include "fmoo/errors.h"
#include "fmoo/random.h"

namespace fmoo {

std::unique_ptr<Problem> MakeProblem(const ExperimentConfig& c) {
  const ProblemConfig& p = c.problem;
  switch (p.kind) {
    case ProblemKind::kQuadratic: {
      QuadraticSuiteParams q;
      q.dimension = c.dimension;
      q.curvature = p.curvature;
      q.curvature_spread = p.curvature_spread;
      q.heterogeneity = p.heterogeneity;
      q.noise = p.noise;
      q.samples_per_client = static_cast<std::size_t>(p.samples_per_client);
      q.seed = c.seed;
      if (p.centers.empty()) {
        RandomStream rng(c.seed, StreamDomain::kProblemGeneration, 0, 0, 0, 0);
        for (std::size_t s = 0; s < c.objectives; ++s) {
          Vector v(static_cast<Eigen::Index>(c.dimension));
          for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = p.center_scale * rng.Normal();
          q.centers.push_back(std::move(v));
        }
      } else {
        for (const auto& row : p.centers) {
          q.centers.push_back(Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size())));
        }
      }
      return std::make_unique<QuadraticProblem>(c.indicator, std::move(q), c.client_weights);
    }
    case ProblemKind::kToyNonconvex: {
      ToySuiteParams t;
      t.dimension = c.dimension;
      t.objectives = c.objectives;
      t.terms = static_cast<std::size_t>(p.terms);
      t.rho = p.rho;
      t.coefficient_scale = p.coefficient_scale;
      t.heterogeneity = p.heterogeneity;
      t.noise = p.noise;
      t.samples_per_client = static_cast<std::size_t>(p.samples_per_client);
      t.seed = c.seed;
      return std::make_unique<ToyNonconvexProblem>(c.indicator, t, c.client_weights);
    }
    case ProblemKind::kClassification: {
      ClassificationSuiteParams cp;
      cp.dimension = c.dimension;
      cp.objectives = c.objectives;
      cp.classes = static_cast<std::size_t>(p.classes);
      cp.samples_per_client = static_cast<std::size_t>(p.samples_per_client);
      cp.label_skew = p.partition == PartitionSkew::kLabelSkew;
      cp.labels_per_client = static_cast<std::size_t>(p.labels_per_client);
      cp.regularization = p.regularization;
      cp.separation = p.separation;
      cp.seed = c.seed;
      if (!p.dataset_file.empty()) {
        return std::make_unique<ClassificationProblem>(c.indicator, cp, ReadDataset(p.dataset_file),
                                                       c.client_weights);
      }
      return std::make_unique<ClassificationProblem>(c.indicator, cp, c.client_weights);
    }
  }
  throw ConfigError("unknown problem type", "problem.type");
}

}  // namespace fmoo
