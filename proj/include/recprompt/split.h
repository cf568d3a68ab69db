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

#ifndef RECPROMPT_SPLIT_H_
#define RECPROMPT_SPLIT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recprompt/common.h"
#include "recprompt/ingest.h"
#include "recprompt/io.h"

namespace recprompt {

inline constexpr std::size_t kDefaultValidationUsers = 3000;

// Bijection between dense item indices and short display ids "I<n>". The
// numbers are a seeded permutation of 0..N-1, so neighbouring ids carry no
// meaning.
class IdMap {
 public:
  IdMap() = default;
  IdMap(std::vector<std::string> forward, std::uint64_t seed);

  const std::string& display(ItemIdx item) const { return forward_.at(item); }
  std::optional<ItemIdx> find(std::string_view display_id) const;
  std::size_t size() const { return forward_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& forward() const { return forward_; }

 private:
  std::vector<std::string> forward_;
  std::unordered_map<std::string, ItemIdx> inverse_;
  std::uint64_t seed_ = 0;
};

IdMap build_id_map(std::size_t n_items, std::uint64_t seed);

// Two-column TSV (raw item id, display id) in item-index order, preceded by
// the provenance comment line.
void save_id_map(const std::filesystem::path& path, const IdMap& ids,
                 std::span<const std::string> raw_item_ids, const FileHeader& header);

struct LoadedIdMap {
  IdMap ids;
  std::vector<std::string> raw_item_ids;
  std::optional<FileHeader> header;
};
LoadedIdMap load_id_map(const std::filesystem::path& path);

struct UserSplit {
  std::vector<SequenceEntry> train;
  SequenceEntry valid;
  SequenceEntry test;
};

struct DatasetSplit {
  std::vector<UserSplit> users;       // indexed by user idx
  std::vector<UserIdx> valid_users;   // sorted ascending
};

// Leave-one-out: last item tests, second to last validates, the rest trains.
// Throws Error for sequences shorter than 3.
DatasetSplit apply_leave_one_out(std::span<const UserSequence> sequences);

// Seeded uniform sample without replacement of min(cap, n_users) users,
// returned in ascending order.
std::vector<UserIdx> select_validation_users(std::size_t n_users, std::uint64_t seed,
                                             std::size_t cap = kDefaultValidationUsers);

// All items of a user (train, valid, test), sorted ascending.
std::vector<ItemIdx> user_item_set(const UserSplit& user);

std::size_t total_train_interactions(const DatasetSplit& split);

}  // namespace recprompt

#endif  // RECPROMPT_SPLIT_H_
