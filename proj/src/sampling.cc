// Copyright 2026 The Recprompt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recprompt/sampling.h"

#include <algorithm>

namespace recprompt {

PopularityTable::PopularityTable(std::vector<std::uint64_t> counts)
    : counts_(std::move(counts)) {
  cumulative_.resize(counts_.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    acc += counts_[i];
    cumulative_[i] = acc;
    if (counts_[i] > 0) ++n_nonzero_;
  }
  total_ = acc;
}

PopularityTable PopularityTable::from_split(const DatasetSplit& split,
                                            std::size_t n_items) {
  std::vector<std::uint64_t> counts(n_items, 0);
  for (const auto& u : split.users) {
    for (const auto& e : u.train) ++counts.at(e.item);
  }
  return PopularityTable(std::move(counts));
}

double PopularityTable::probability(ItemIdx item) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_[item]) / static_cast<double>(total_);
}

ItemIdx PopularityTable::draw(Rng& rng) const {
  if (total_ == 0) throw Error("popularity table is empty");
  std::uint64_t r = uniform_index(rng, total_);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return static_cast<ItemIdx>(it - cumulative_.begin());
}

namespace {

bool contains(std::span<const ItemIdx> sorted, ItemIdx item) {
  return std::binary_search(sorted.begin(), sorted.end(), item);
}

}  // namespace

std::vector<ItemIdx> sample_negatives_by_popularity(std::span<const ItemIdx> excluded,
                                                    const PopularityTable& table,
                                                    std::size_t n, Rng& rng) {
  std::vector<ItemIdx> chosen;
  if (n == 0) return chosen;

  std::size_t excluded_nonzero = 0;
  std::uint64_t excluded_weight = 0;
  for (ItemIdx item : excluded) {
    if (item < table.n_items() && table.count(item) > 0) {
      ++excluded_nonzero;
      excluded_weight += table.count(item);
    }
  }
  const std::size_t eligible = table.n_nonzero() - excluded_nonzero;
  if (eligible < n) {
    throw Error("cannot sample " + std::to_string(n) + " negatives: only " +
                std::to_string(eligible) + " items with nonzero popularity lie " +
                "outside the user's sequence");
  }

  // Rejection against the full CDF is the same successive-sampling law as
  // drawing from the renormalised eligible mass. When the eligible mass is a
  // small share of the total, switch to explicit sequential draws.
  chosen.reserve(n);
  const std::uint64_t eligible_weight = table.total() - excluded_weight;
  const bool use_rejection = eligible_weight * 4 >= table.total();
  if (use_rejection) {
    const std::size_t budget = 64 * n + 1024;
    for (std::size_t attempt = 0; attempt < budget && chosen.size() < n; ++attempt) {
      ItemIdx item = table.draw(rng);
      if (contains(excluded, item)) continue;
      if (std::find(chosen.begin(), chosen.end(), item) != chosen.end()) continue;
      chosen.push_back(item);
    }
    if (chosen.size() == n) return chosen;
  }

  std::vector<ItemIdx> pool;
  std::vector<std::uint64_t> weights;
  for (std::size_t i = 0; i < table.n_items(); ++i) {
    auto item = static_cast<ItemIdx>(i);
    if (table.count(item) == 0 || contains(excluded, item)) continue;
    if (std::find(chosen.begin(), chosen.end(), item) != chosen.end()) continue;
    pool.push_back(item);
    weights.push_back(table.count(item));
  }
  std::uint64_t remaining = 0;
  for (auto w : weights) remaining += w;
  while (chosen.size() < n) {
    std::uint64_t r = uniform_index(rng, remaining);
    std::size_t k = 0;
    while (r >= weights[k]) {
      r -= weights[k];
      ++k;
    }
    chosen.push_back(pool[k]);
    remaining -= weights[k];
    weights[k] = 0;
  }
  return chosen;
}

}  // namespace recprompt
