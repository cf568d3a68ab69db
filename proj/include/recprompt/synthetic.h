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

// Seeded review/catalog generator with planted structure: Zipf popularity,
// taste clusters and a successor chain. Output uses the raw review and
// metadata formats so it exercises the full ingest path.

#ifndef RECPROMPT_SYNTHETIC_H_
#define RECPROMPT_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "recprompt/common.h"
#include "recprompt/ingest.h"

namespace recprompt {

struct SyntheticConfig {
  std::size_t n_users = 1000;
  std::size_t n_items = 500;
  std::size_t min_length = 5;
  std::size_t max_length = 20;
  double zipf_exponent = 1.0;
  // Items are dealt round-robin to clusters; a user draws from their own
  // cluster with probability `cluster_affinity`, otherwise from anywhere.
  std::size_t n_clusters = 1;
  double cluster_affinity = 1.0;
  // Probability that the next item is the planted successor of the previous.
  double chain_prob = 0.0;
  // Each user likes an item with a probability drawn from this range.
  double like_min = 0.3;
  double like_max = 0.9;
  double missing_title_fraction = 0.0;
  std::int64_t start_time = 1262304000;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  std::vector<RawInteraction> interactions;  // grouped by user, chronological
  std::vector<ItemMetadata> metadata;        // one record per item (titled ones)
  std::vector<std::string> item_ids;         // raw id per generator item
  std::vector<std::size_t> successor;        // planted chain over generator items
  std::vector<std::size_t> item_cluster;
  std::vector<std::size_t> user_cluster;
};

// Throws Error when a user cannot be given max_length distinct items.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

// Amazon-style review lines (reviewerID, asin, overall, unixReviewTime).
void write_reviews_jsonl(const std::filesystem::path& path,
                         std::span<const RawInteraction> interactions);
void write_metadata_jsonl(const std::filesystem::path& path,
                          std::span<const ItemMetadata> metadata);

}  // namespace recprompt

#endif  // RECPROMPT_SYNTHETIC_H_
