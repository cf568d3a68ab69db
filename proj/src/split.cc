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

#include "recprompt/split.h"

#include <algorithm>
#include <numeric>

#include "recprompt/rng.h"

namespace recprompt {

IdMap::IdMap(std::vector<std::string> forward, std::uint64_t seed)
    : forward_(std::move(forward)), seed_(seed) {
  inverse_.reserve(forward_.size());
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    if (!inverse_.emplace(forward_[i], static_cast<ItemIdx>(i)).second) {
      throw Error("display id " + forward_[i] + " assigned twice");
    }
  }
}

std::optional<ItemIdx> IdMap::find(std::string_view display_id) const {
  auto it = inverse_.find(std::string(display_id));
  if (it == inverse_.end()) return std::nullopt;
  return it->second;
}

IdMap build_id_map(std::size_t n_items, std::uint64_t seed) {
  if (n_items == 0) throw Error("cannot build an id map over zero items");
  std::vector<std::uint32_t> perm(n_items);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(seed);
  shuffle(std::span<std::uint32_t>(perm), rng);
  std::vector<std::string> forward(n_items);
  for (std::size_t j = 0; j < n_items; ++j) forward[j] = "I" + std::to_string(perm[j]);
  return IdMap(std::move(forward), seed);
}

void save_id_map(const std::filesystem::path& path, const IdMap& ids,
                 std::span<const std::string> raw_item_ids, const FileHeader& header) {
  if (raw_item_ids.size() != ids.size()) {
    throw Error("id map covers " + std::to_string(ids.size()) + " items but " +
                std::to_string(raw_item_ids.size()) + " raw ids were given");
  }
  auto out = open_output(path);
  out << header.to_comment() << " idmap_seed=" << ids.seed() << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << raw_item_ids[i] << '\t' << ids.display(static_cast<ItemIdx>(i)) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

LoadedIdMap load_id_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  LoadedIdMap loaded;
  std::vector<std::string> forward;
  std::uint64_t idmap_seed = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      loaded.header = FileHeader::from_comment(line);
      auto pos = line.find("idmap_seed=");
      if (pos != std::string::npos) idmap_seed = std::stoull(line.substr(pos + 11));
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected two tab-separated columns");
    }
    loaded.raw_item_ids.push_back(line.substr(0, tab));
    forward.push_back(line.substr(tab + 1));
  }
  loaded.ids = IdMap(std::move(forward), idmap_seed);
  return loaded;
}

DatasetSplit apply_leave_one_out(std::span<const UserSequence> sequences) {
  DatasetSplit split;
  split.users.reserve(sequences.size());
  for (const auto& seq : sequences) {
    const auto n = seq.items.size();
    if (n < 3) {
      throw Error("user " + std::to_string(seq.user) + " has " + std::to_string(n) +
                  " interactions; leave-one-out needs at least 3");
    }
    UserSplit u;
    u.train.assign(seq.items.begin(), seq.items.end() - 2);
    u.valid = seq.items[n - 2];
    u.test = seq.items[n - 1];
    split.users.push_back(std::move(u));
  }
  return split;
}

std::vector<UserIdx> select_validation_users(std::size_t n_users, std::uint64_t seed,
                                             std::size_t cap) {
  std::vector<UserIdx> users(n_users);
  std::iota(users.begin(), users.end(), 0u);
  const std::size_t m = std::min(cap, n_users);
  Rng rng(seed);
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + uniform_index(rng, n_users - i);
    std::swap(users[i], users[j]);
  }
  users.resize(m);
  std::sort(users.begin(), users.end());
  return users;
}

std::vector<ItemIdx> user_item_set(const UserSplit& user) {
  std::vector<ItemIdx> items;
  items.reserve(user.train.size() + 2);
  for (const auto& e : user.train) items.push_back(e.item);
  items.push_back(user.valid.item);
  items.push_back(user.test.item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::size_t total_train_interactions(const DatasetSplit& split) {
  std::size_t total = 0;
  for (const auto& u : split.users) total += u.train.size();
  return total;
}

}  // namespace recprompt
