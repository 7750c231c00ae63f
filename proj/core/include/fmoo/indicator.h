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

#ifndef FMOO_INDICATOR_H_
#define FMOO_INDICATOR_H_

#include <cstddef>
#include <vector>

namespace fmoo {

// Binary S x M routing of objectives (rows) to clients (columns).
// Immutable; every row and every column holds at least one 1.
class IndicatorMatrix {
 public:
  // Throws ConfigError naming the offending row/column/entry.
  explicit IndicatorMatrix(std::vector<std::vector<int>> entries);

  static IndicatorMatrix Identity(std::size_t n);
  static IndicatorMatrix AllOnes(std::size_t objectives, std::size_t clients);

  std::size_t objectives() const { return entries_.size(); }
  std::size_t clients() const { return entries_.empty() ? 0 : entries_[0].size(); }
  bool at(std::size_t s, std::size_t i) const { return entries_[s][i] != 0; }

  // R_s: ascending client indices owning objective s.
  const std::vector<std::size_t>& owners(std::size_t s) const { return owner_sets_[s]; }
  const std::vector<std::vector<std::size_t>>& owner_sets() const { return owner_sets_; }
  // S_i: ascending objective indices client i participates in.
  const std::vector<std::size_t>& objectives_of(std::size_t i) const { return client_sets_[i]; }

  const std::vector<std::vector<int>>& entries() const { return entries_; }

 private:
  std::vector<std::vector<int>> entries_;
  std::vector<std::vector<std::size_t>> owner_sets_;
  std::vector<std::vector<std::size_t>> client_sets_;
};

std::vector<std::vector<std::size_t>> DeriveOwnerSets(const IndicatorMatrix& a);

}  // namespace fmoo

#endif  // FMOO_INDICATOR_H_
