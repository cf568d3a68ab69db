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

#ifndef RECPROMPT_SAMPLING_H_
#define RECPROMPT_SAMPLING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "recprompt/common.h"
#include "recprompt/rng.h"
#include "recprompt/split.h"

namespace recprompt {

// Train-interaction counts per item with an integer CDF for weighted draws.
// Weights are the raw counts; items absent from train have weight 0.
class PopularityTable {
 public:
  PopularityTable() = default;
  explicit PopularityTable(std::vector<std::uint64_t> counts);

  static PopularityTable from_split(const DatasetSplit& split, std::size_t n_items);

  std::size_t n_items() const { return counts_.size(); }
  std::uint64_t count(ItemIdx item) const { return counts_[item]; }
  std::uint64_t total() const { return total_; }
  std::size_t n_nonzero() const { return n_nonzero_; }
  double probability(ItemIdx item) const;
  std::span<const std::uint64_t> counts() const { return counts_; }

  // One draw proportional to count. Requires total() > 0.
  ItemIdx draw(Rng& rng) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
  std::size_t n_nonzero_ = 0;
};

// Draws n distinct items outside `excluded` (sorted ascending), each step
// proportional to popularity among the items not yet chosen. Throws Error
// when fewer than n eligible items have nonzero weight.
std::vector<ItemIdx> sample_negatives_by_popularity(std::span<const ItemIdx> excluded,
                                                    const PopularityTable& table,
                                                    std::size_t n, Rng& rng);

}  // namespace recprompt

#endif  // RECPROMPT_SAMPLING_H_
