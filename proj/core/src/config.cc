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

#include "fmoo/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "fmoo/errors.h"
#include "fmoo/minnorm.h"

namespace fmoo {
namespace {

using nlohmann::json;

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void RejectUnknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key", Join(path, key));
  }
}

const json& Require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key", Join(path, key));
  return *it;
}

double GetNumber(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("expected a number", path);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("expected a finite number", path);
  return x;
}

std::uint64_t GetUnsigned(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError("expected a non-negative integer", path);
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError("expected a non-negative integer", path);
}

std::string GetString(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("expected a string", path);
  return v.get<std::string>();
}

bool GetBool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError("expected true or false", path);
  return v.get<bool>();
}

std::vector<double> GetVector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("expected an array of numbers", path);
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(GetNumber(v[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

template <typename Setter>
void Optional(const json& obj, const std::string& key, Setter&& set) {
  auto it = obj.find(key);
  if (it != obj.end()) set(*it);
}

ProblemConfig ParseProblem(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("expected an object", path);
  ProblemConfig p;
  const std::string type = GetString(Require(j, "type", path), Join(path, "type"));
  std::set<std::string> allowed = {"type", "samples_per_client"};
  if (type == "quadratic") {
    p.kind = ProblemKind::kQuadratic;
    allowed.insert({"heterogeneity", "noise", "curvature", "curvature_spread", "centers",
                    "center_scale"});
  } else if (type == "toy_nonconvex") {
    p.kind = ProblemKind::kToyNonconvex;
    allowed.insert({"heterogeneity", "noise", "terms", "rho", "coefficient_scale"});
  } else if (type == "classification") {
    p.kind = ProblemKind::kClassification;
    allowed.insert({"classes", "partition", "labels_per_client", "regularization", "separation",
                    "dataset_file"});
  } else {
    throw ConfigError("expected quadratic, toy_nonconvex or classification", Join(path, "type"));
  }
  RejectUnknown(j, allowed, path);

  auto num = [&](const char* key, double& dst) {
    Optional(j, key, [&](const json& v) { dst = GetNumber(v, Join(path, key)); });
  };
  auto integer = [&](const char* key, int& dst) {
    Optional(j, key, [&](const json& v) {
      dst = static_cast<int>(GetUnsigned(v, Join(path, key)));
    });
  };
  num("heterogeneity", p.heterogeneity);
  num("noise", p.noise);
  integer("samples_per_client", p.samples_per_client);
  num("curvature", p.curvature);
  num("curvature_spread", p.curvature_spread);
  num("center_scale", p.center_scale);
  Optional(j, "centers", [&](const json& v) {
    const std::string cp = Join(path, "centers");
    if (!v.is_array()) throw ConfigError("expected an array of points", cp);
    for (std::size_t k = 0; k < v.size(); ++k) {
      p.centers.push_back(GetVector(v[k], cp + "[" + std::to_string(k) + "]"));
    }
  });
  integer("terms", p.terms);
  num("rho", p.rho);
  num("coefficient_scale", p.coefficient_scale);
  integer("classes", p.classes);
  Optional(j, "partition", [&](const json& v) {
    const std::string s = GetString(v, Join(path, "partition"));
    if (s == "iid") {
      p.partition = PartitionSkew::kIid;
    } else if (s == "label-skew") {
      p.partition = PartitionSkew::kLabelSkew;
    } else {
      throw ConfigError("expected iid or label-skew", Join(path, "partition"));
    }
  });
  integer("labels_per_client", p.labels_per_client);
  num("regularization", p.regularization);
  num("separation", p.separation);
  Optional(j, "dataset_file", [&](const json& v) {
    p.dataset_file = GetString(v, Join(path, "dataset_file"));
  });
  return p;
}

}  // namespace

std::size_t ExperimentConfig::EffectiveMaxIter() const {
  return minnorm_max_iter ? minnorm_max_iter : minnorm::DefaultMaxIter(objectives, dimension);
}

const char* ToString(GradientMode m) {
  return m == GradientMode::kFull ? "full" : "stochastic";
}
const char* ToString(SampleSharing s) {
  return s == SampleSharing::kPerClient ? "per-client" : "per-objective";
}
const char* ToString(ProblemKind k) {
  switch (k) {
    case ProblemKind::kQuadratic: return "quadratic";
    case ProblemKind::kToyNonconvex: return "toy_nonconvex";
    case ProblemKind::kClassification: return "classification";
  }
  return "?";
}
const char* ToString(PartitionSkew p) {
  return p == PartitionSkew::kIid ? "iid" : "label-skew";
}

void RefreshIndicator(ExperimentConfig& c) {
  if (c.indicator_kind == "all-ones") {
    c.indicator = IndicatorMatrix::AllOnes(c.objectives, c.clients);
  } else if (c.indicator_kind == "identity") {
    if (c.objectives != c.clients) {
      throw ConfigError("identity indicator needs objectives == clients", "indicator");
    }
    c.indicator = IndicatorMatrix::Identity(c.clients);
  }
}

ExperimentConfig ParseConfig(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object", "<root>");
  RejectUnknown(j,
                {"clients", "objectives", "dimension", "indicator", "client_weights",
                 "local_steps", "rounds", "eta_global", "eta_local", "mode", "batch_size", "seed",
                 "sample_sharing", "normalize_delta_by_K", "initial_point", "snapshot_every",
                 "minnorm", "threshold_eps", "problem"},
                "");
  ExperimentConfig c;
  c.clients = GetUnsigned(Require(j, "clients", ""), "clients");
  c.objectives = GetUnsigned(Require(j, "objectives", ""), "objectives");
  c.dimension = GetUnsigned(Require(j, "dimension", ""), "dimension");
  c.rounds = GetUnsigned(Require(j, "rounds", ""), "rounds");
  c.eta_global = GetNumber(Require(j, "eta_global", ""), "eta_global");
  if (c.clients == 0) throw ConfigError("must be positive", "clients");
  if (c.objectives == 0) throw ConfigError("must be positive", "objectives");

  auto ind = j.find("indicator");
  if (ind == j.end() || ind->is_string()) {
    c.indicator_kind = ind == j.end() ? "all-ones" : ind->get<std::string>();
    if (c.indicator_kind != "all-ones" && c.indicator_kind != "identity") {
      throw ConfigError("expected all-ones, identity, or a 0/1 matrix", "indicator");
    }
    RefreshIndicator(c);
  } else {
    if (!ind->is_array()) throw ConfigError("expected all-ones, identity, or a 0/1 matrix", "indicator");
    std::vector<std::vector<int>> rows;
    for (std::size_t s = 0; s < ind->size(); ++s) {
      const auto& row = (*ind)[s];
      const std::string rp = "indicator[" + std::to_string(s) + "]";
      if (!row.is_array()) throw ConfigError("expected an array", rp);
      std::vector<int> r;
      for (std::size_t i = 0; i < row.size(); ++i) {
        r.push_back(static_cast<int>(GetUnsigned(row[i], rp + "[" + std::to_string(i) + "]")));
      }
      rows.push_back(std::move(r));
    }
    c.indicator_kind = "explicit";
    c.indicator = IndicatorMatrix(std::move(rows));
  }

  Optional(j, "client_weights", [&](const json& v) { c.client_weights = GetVector(v, "client_weights"); });
  Optional(j, "local_steps", [&](const json& v) { c.local_steps = GetUnsigned(v, "local_steps"); });
  Optional(j, "eta_local", [&](const json& v) { c.eta_local = GetNumber(v, "eta_local"); });
  Optional(j, "mode", [&](const json& v) {
    const std::string m = GetString(v, "mode");
    if (m == "full") {
      c.mode = GradientMode::kFull;
    } else if (m == "stochastic") {
      c.mode = GradientMode::kStochastic;
    } else {
      throw ConfigError("expected full or stochastic", "mode");
    }
  });
  Optional(j, "batch_size", [&](const json& v) {
    if (v.is_string() && v.get<std::string>() == "full") {
      c.batch_size = 0;
    } else {
      c.batch_size = GetUnsigned(v, "batch_size");
      if (c.batch_size == 0) throw ConfigError("must be >= 1 or \"full\"", "batch_size");
    }
  });
  Optional(j, "seed", [&](const json& v) { c.seed = GetUnsigned(v, "seed"); });
  Optional(j, "sample_sharing", [&](const json& v) {
    const std::string m = GetString(v, "sample_sharing");
    if (m == "per-client") {
      c.sample_sharing = SampleSharing::kPerClient;
    } else if (m == "per-objective") {
      c.sample_sharing = SampleSharing::kPerObjective;
    } else {
      throw ConfigError("expected per-client or per-objective", "sample_sharing");
    }
  });
  Optional(j, "normalize_delta_by_K", [&](const json& v) {
    c.normalize_delta_by_k = GetBool(v, "normalize_delta_by_K");
  });
  Optional(j, "initial_point", [&](const json& v) { c.initial_point = GetVector(v, "initial_point"); });
  Optional(j, "snapshot_every", [&](const json& v) { c.snapshot_every = GetUnsigned(v, "snapshot_every"); });
  Optional(j, "minnorm", [&](const json& v) {
    if (!v.is_object()) throw ConfigError("expected an object", "minnorm");
    RejectUnknown(v, {"tol", "max_iter"}, "minnorm");
    Optional(v, "tol", [&](const json& t) { c.minnorm_tol = GetNumber(t, "minnorm.tol"); });
    Optional(v, "max_iter", [&](const json& t) { c.minnorm_max_iter = GetUnsigned(t, "minnorm.max_iter"); });
  });
  Optional(j, "threshold_eps", [&](const json& v) { c.threshold_eps = GetVector(v, "threshold_eps"); });
  c.problem = ParseProblem(Require(j, "problem", ""), "problem");
  Validate(c);
  return c;
}

void Validate(const ExperimentConfig& c) {
  if (c.clients == 0) throw ConfigError("must be positive", "clients");
  if (c.objectives == 0) throw ConfigError("must be positive", "objectives");
  if (c.dimension == 0) throw ConfigError("must be positive", "dimension");
  if (c.indicator.objectives() != c.objectives || c.indicator.clients() != c.clients) {
    throw ConfigError("indicator must be objectives x clients", "indicator");
  }
  if (!c.client_weights.empty() && c.client_weights.size() != c.clients) {
    throw ConfigError("expected one weight per client", "client_weights");
  }
  for (std::size_t i = 0; i < c.client_weights.size(); ++i) {
    if (!(c.client_weights[i] > 0.0)) {
      throw ConfigError("must be positive", "client_weights[" + std::to_string(i) + "]");
    }
  }
  if (c.local_steps < 1) throw ConfigError("must be >= 1", "local_steps");
  if (c.rounds < 1) throw ConfigError("must be >= 1", "rounds");
  if (!(c.eta_global > 0.0) || !std::isfinite(c.eta_global)) throw ConfigError("must be > 0", "eta_global");
  if (!(c.eta_local >= 0.0) || !std::isfinite(c.eta_local)) throw ConfigError("must be >= 0", "eta_local");
  if (!c.initial_point.empty() && c.initial_point.size() != c.dimension) {
    throw ConfigError("length must equal dimension", "initial_point");
  }
  for (double v : c.initial_point) {
    if (!std::isfinite(v)) throw ConfigError("must be finite", "initial_point");
  }
  if (!(c.minnorm_tol > 0.0)) throw ConfigError("must be positive", "minnorm.tol");
  for (std::size_t k = 0; k < c.threshold_eps.size(); ++k) {
    if (!(c.threshold_eps[k] > 0.0)) {
      throw ConfigError("must be positive", "threshold_eps[" + std::to_string(k) + "]");
    }
  }
  const ProblemConfig& p = c.problem;
  if (p.samples_per_client < 1) throw ConfigError("must be positive", "problem.samples_per_client");
  if (c.mode == GradientMode::kStochastic && c.batch_size > static_cast<std::size_t>(p.samples_per_client) &&
      p.kind != ProblemKind::kClassification) {
    throw ConfigError("batch larger than the client shard (" +
                          std::to_string(p.samples_per_client) + " samples)",
                      "batch_size");
  }
  if (p.kind == ProblemKind::kQuadratic && !p.centers.empty()) {
    if (p.centers.size() != c.objectives) {
      throw ConfigError("expected one centre per objective", "problem.centers");
    }
    for (std::size_t s = 0; s < p.centers.size(); ++s) {
      if (p.centers[s].size() != c.dimension) {
        throw ConfigError("length must equal dimension",
                          "problem.centers[" + std::to_string(s) + "]");
      }
    }
  }
  if (p.kind == ProblemKind::kToyNonconvex && c.dimension < 2) {
    throw ConfigError("toy non-convex suite needs dimension >= 2", "dimension");
  }
  if (p.kind == ProblemKind::kClassification && c.dimension < 2) {
    throw ConfigError("classification suite needs dimension >= 2", "dimension");
  }
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string(), "<file>");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "<file>");
  }
  return ParseConfig(j);
}

json ToJson(const ExperimentConfig& c) {
  json j;
  j["clients"] = c.clients;
  j["objectives"] = c.objectives;
  j["dimension"] = c.dimension;
  if (c.indicator_kind == "explicit") {
    j["indicator"] = c.indicator.entries();
  } else {
    j["indicator"] = c.indicator_kind;
  }
  if (!c.client_weights.empty()) j["client_weights"] = c.client_weights;
  j["local_steps"] = c.local_steps;
  j["rounds"] = c.rounds;
  j["eta_global"] = c.eta_global;
  j["eta_local"] = c.eta_local;
  j["mode"] = ToString(c.mode);
  if (c.batch_size == 0) {
    j["batch_size"] = "full";
  } else {
    j["batch_size"] = c.batch_size;
  }
  j["seed"] = c.seed;
  j["sample_sharing"] = ToString(c.sample_sharing);
  j["normalize_delta_by_K"] = c.normalize_delta_by_k;
  if (!c.initial_point.empty()) j["initial_point"] = c.initial_point;
  j["snapshot_every"] = c.snapshot_every;
  j["minnorm"] = {{"tol", c.minnorm_tol}, {"max_iter", c.minnorm_max_iter}};
  j["threshold_eps"] = c.threshold_eps;

  const ProblemConfig& p = c.problem;
  json pj;
  pj["type"] = ToString(p.kind);
  pj["samples_per_client"] = p.samples_per_client;
  switch (p.kind) {
    case ProblemKind::kQuadratic:
      pj["heterogeneity"] = p.heterogeneity;
      pj["noise"] = p.noise;
      pj["curvature"] = p.curvature;
      pj["curvature_spread"] = p.curvature_spread;
      pj["center_scale"] = p.center_scale;
      if (!p.centers.empty()) pj["centers"] = p.centers;
      break;
    case ProblemKind::kToyNonconvex:
      pj["heterogeneity"] = p.heterogeneity;
      pj["noise"] = p.noise;
      pj["terms"] = p.terms;
      pj["rho"] = p.rho;
      pj["coefficient_scale"] = p.coefficient_scale;
      break;
    case ProblemKind::kClassification:
      pj["classes"] = p.classes;
      pj["partition"] = ToString(p.partition);
      pj["labels_per_client"] = p.labels_per_client;
      pj["regularization"] = p.regularization;
      pj["separation"] = p.separation;
      if (!p.dataset_file.empty()) pj["dataset_file"] = p.dataset_file;
      break;
  }
  j["problem"] = std::move(pj);
  return j;
}

}  // namespace fmoo
