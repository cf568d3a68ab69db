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
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace recprompt {
namespace {

TEST(IdMap, SingleItem) {
  IdMap m = build_id_map(1, 12345);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.display(0), "I0");
}

TEST(IdMap, BijectionOverFullCatalog) {
  const std::size_t n = 11924;
  IdMap m = build_id_map(n, 7);
  std::set<std::string> seen;
  for (ItemIdx j = 0; j < n; ++j) {
    seen.insert(m.display(j));
    EXPECT_EQ(m.find(m.display(j)), std::optional<ItemIdx>(j));
  }
  EXPECT_EQ(seen.size(), n);
  for (std::size_t v = 0; v < n; ++v) EXPECT_TRUE(seen.count("I" + std::to_string(v)));
  EXPECT_FALSE(m.find("I11924").has_value());
}

TEST(IdMap, SeedsDiffer) {
  EXPECT_NE(build_id_map(100, 1).forward(), build_id_map(100, 2).forward());
  EXPECT_EQ(build_id_map(100, 1).forward(), build_id_map(100, 1).forward());
}

TEST(IdMap, FileRoundTrip) {
  testing::TempDir dir;
  IdMap m = build_id_map(50, 3);
  std::vector<std::string> raw;
  for (int j = 0; j < 50; ++j) raw.push_back("B00" + std::to_string(j));
  save_id_map(dir / "ids.tsv", m, raw, FileHeader::make(9, "d"));
  auto text = testing::read_file(dir / "ids.tsv");
  EXPECT_EQ(text.rfind("# tool=recprompt ", 0), 0u);
  LoadedIdMap back = load_id_map(dir / "ids.tsv");
  EXPECT_EQ(back.ids.forward(), m.forward());
  EXPECT_EQ(back.ids.seed(), 3u);
  EXPECT_EQ(back.raw_item_ids, raw);
  ASSERT_TRUE(back.header.has_value());
  EXPECT_EQ(back.header->seed, 9u);
}

TEST(LeaveOneOut, FiveItems) {
  DatasetSplit s = testing::make_split({{10, 11, 12, 13, 14}});
  ASSERT_EQ(s.users.size(), 1u);
  EXPECT_EQ(s.users[0].train, testing::entries({10, 11, 12}));
  EXPECT_EQ(s.users[0].valid.item, 13u);
  EXPECT_EQ(s.users[0].test.item, 14u);
}

TEST(LeaveOneOut, TooShortIsFatal) {
  std::vector<UserSequence> seqs = {{0, testing::entries({1, 2})}};
  EXPECT_THROW(apply_leave_one_out(seqs), Error);
}

TEST(LeaveOneOut, Completeness) {
  Rng rng(4);
  std::vector<std::vector<ItemIdx>> seqs;
  for (int u = 0; u < 40; ++u) {
    std::vector<ItemIdx> s;
    for (std::size_t n = 0; n < 5 + uniform_index(rng, 20); ++n) s.push_back(static_cast<ItemIdx>(n * 3 + u));
    seqs.push_back(s);
  }
  DatasetSplit split = testing::make_split(seqs);
  std::size_t total = 0;
  for (std::size_t u = 0; u < seqs.size(); ++u) {
    std::vector<SequenceEntry> all = split.users[u].train;
    all.push_back(split.users[u].valid);
    all.push_back(split.users[u].test);
    EXPECT_EQ(all, testing::entries(seqs[u]));
    EXPECT_LE(split.users[u].valid.timestamp, split.users[u].test.timestamp);
    total += seqs[u].size() - 2;
  }
  EXPECT_EQ(total_train_interactions(split), total);
}

TEST(ValidationUsers, CapAndDeterminism) {
  auto a = select_validation_users(19412, 5);
  EXPECT_EQ(a.size(), 3000u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<UserIdx>(a.begin(), a.end()).size(), 3000u);
  EXPECT_EQ(a, select_validation_users(19412, 5));
  EXPECT_NE(a, select_validation_users(19412, 6));
  auto all = select_validation_users(100, 5);
  ASSERT_EQ(all.size(), 100u);
  for (UserIdx u = 0; u < 100; ++u) EXPECT_EQ(all[u], u);
}

TEST(UserItemSet, SortedUnique) {
  DatasetSplit s = testing::make_split({{9, 3, 7, 1, 5}});
  EXPECT_EQ(user_item_set(s.users[0]), (std::vector<ItemIdx>{1, 3, 5, 7, 9}));
}

}  // namespace
}  // namespace recprompt
