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

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "fmoo/errors.h"
#include "fmoo/problem.h"
#include "fmoo/random.h"

namespace fmoo {
namespace {

template <typename T>
void Shuffle(std::vector<T>& v, RandomStream& rng) {
  for (std::size_t k = v.size(); k > 1; --k) {
    std::swap(v[k - 1], v[rng.UniformIndex(k)]);
  }
}

}  // namespace

PartitionPlan Partition(const std::vector<int>& labels, std::size_t clients, bool label_skew,
                        std::size_t labels_per_client, std::uint64_t seed) {
  if (clients == 0) throw ConfigError("must be positive", "clients");
  if (labels.size() < clients) {
    throw ConfigError("fewer samples (" + std::to_string(labels.size()) + ") than clients",
                      "problem.partition");
  }
  PartitionPlan plan;
  plan.shards.resize(clients);

  if (!label_skew) {
    RandomStream rng(seed, StreamDomain::kPartition, 0, 0, 0, 0);
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    Shuffle(order, rng);
    const std::size_t base = labels.size() / clients;
    const std::size_t extra = labels.size() % clients;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < clients; ++i) {
      const std::size_t n = base + (i < extra ? 1 : 0);
      plan.shards[i].assign(order.begin() + static_cast<long>(pos),
                            order.begin() + static_cast<long>(pos + n));
      std::sort(plan.shards[i].begin(), plan.shards[i].end());
      pos += n;
    }
    plan.skew = "iid";
    return plan;
  }

  if (labels_per_client == 0) throw ConfigError("must be positive", "problem.labels_per_client");
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t j = 0; j < labels.size(); ++j) by_label[labels[j]].push_back(j);
  std::vector<int> distinct;
  for (const auto& [label, _] : by_label) distinct.push_back(label);

  const std::size_t slots = clients * labels_per_client;
  if (distinct.size() > slots) {
    throw ConfigError("infeasible label skew: " + std::to_string(distinct.size()) +
                          " labels cannot be covered by " + std::to_string(clients) +
                          " clients holding " + std::to_string(labels_per_client) + " each",
                      "problem.labels_per_client");
  }
  RandomStream rng(seed, StreamDomain::kPartition, 1, 0, 0, 0);
  Shuffle(distinct, rng);

  // Slot k holds label distinct[k mod L]; client i owns slots [i*k, (i+1)*k).
  std::map<int, std::size_t> slot_count;
  std::vector<int> slot_label(slots);
  for (std::size_t k = 0; k < slots; ++k) {
    slot_label[k] = distinct[k % distinct.size()];
    ++slot_count[slot_label[k]];
  }
  std::map<int, std::size_t> next_chunk;
  for (auto& [label, idx] : by_label) {
    if (idx.size() < slot_count[label]) {
      throw ConfigError("infeasible label skew: label " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " samples for " +
                            std::to_string(slot_count[label]) + " shards",
                        "problem.labels_per_client");
    }
    Shuffle(idx, rng);
  }
  for (std::size_t k = 0; k < slots; ++k) {
    const int label = slot_label[k];
    const auto& idx = by_label[label];
    const std::size_t parts = slot_count[label];
    const std::size_t chunk = next_chunk[label]++;
    const std::size_t begin = chunk * idx.size() / parts;
    const std::size_t end = (chunk + 1) * idx.size() / parts;
    auto& shard = plan.shards[k / labels_per_client];
    shard.insert(shard.end(), idx.begin() + static_cast<long>(begin),
                 idx.begin() + static_cast<long>(end));
  }
  for (auto& shard : plan.shards) std::sort(shard.begin(), shard.end());
  plan.skew = "label-skew(" + std::to_string(labels_per_client) + ")";
  plan.labels_per_client = labels_per_client;
  return plan;
}

}  // namespace fmoo
