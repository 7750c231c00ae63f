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

#include "fmoo/indicator.h"

#include <string>

#include "fmoo/errors.h"

namespace fmoo {

IndicatorMatrix::IndicatorMatrix(std::vector<std::vector<int>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("indicator matrix has no rows", "indicator");
  const std::size_t m = entries_[0].size();
  if (m == 0) throw ConfigError("indicator matrix has no columns", "indicator");
  for (std::size_t s = 0; s < entries_.size(); ++s) {
    if (entries_[s].size() != m) {
      throw ConfigError("row length " + std::to_string(entries_[s].size()) +
                            " differs from " + std::to_string(m),
                        "indicator[" + std::to_string(s) + "]");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (entries_[s][i] != 0 && entries_[s][i] != 1) {
        throw ConfigError("entries must be 0 or 1",
                          "indicator[" + std::to_string(s) + "][" + std::to_string(i) + "]");
      }
    }
  }
  owner_sets_.resize(entries_.size());
  client_sets_.resize(m);
  for (std::size_t s = 0; s < entries_.size(); ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      if (entries_[s][i]) {
        owner_sets_[s].push_back(i);
        client_sets_[i].push_back(s);
      }
    }
    if (owner_sets_[s].empty()) {
      throw ConfigError("objective " + std::to_string(s) + " has no owning client",
                        "indicator[" + std::to_string(s) + "]");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (client_sets_[i].empty()) {
      throw ConfigError("client " + std::to_string(i) + " has no objectives",
                        "indicator[*][" + std::to_string(i) + "]");
    }
  }
}

IndicatorMatrix IndicatorMatrix::Identity(std::size_t n) {
  std::vector<std::vector<int>> e(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) e[i][i] = 1;
  return IndicatorMatrix(std::move(e));
}

IndicatorMatrix IndicatorMatrix::AllOnes(std::size_t objectives, std::size_t clients) {
  return IndicatorMatrix(std::vector<std::vector<int>>(objectives, std::vector<int>(clients, 1)));
}

std::vector<std::vector<std::size_t>> DeriveOwnerSets(const IndicatorMatrix& a) {
  return a.owner_sets();
}

}  // namespace fmoo
