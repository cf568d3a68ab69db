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

#include "recprompt/synthetic.h"

#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace recprompt {
namespace {

TEST(Synthetic, ShapesAndDeterminism) {
  SyntheticConfig c;
  c.n_users = 50;
  c.n_items = 60;
  c.seed = 4;
  SyntheticDataset a = generate_synthetic(c);
  SyntheticDataset b = generate_synthetic(c);
  EXPECT_EQ(a.interactions, b.interactions);
  std::map<std::string, std::set<std::string>> per_user;
  std::map<std::string, std::size_t> lengths;
  for (const auto& r : a.interactions) {
    EXPECT_TRUE(per_user[r.user].insert(r.item).second) << "repeat for " << r.user;
    ++lengths[r.user];
    EXPECT_GE(r.rating, 1.0);
    EXPECT_LE(r.rating, 5.0);
  }
  EXPECT_EQ(per_user.size(), 50u);
  for (const auto& [u, n] : lengths) {
    EXPECT_GE(n, c.min_length);
    EXPECT_LE(n, c.max_length);
  }
  c.seed = 5;
  EXPECT_NE(generate_synthetic(c).interactions, a.interactions);
}

TEST(Synthetic, ChainIsFollowed) {
  SyntheticConfig c;
  c.n_users = 30;
  c.n_items = 40;
  c.chain_prob = 1.0;
  c.seed = 2;
  SyntheticDataset d = generate_synthetic(c);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < d.item_ids.size(); ++j) index[d.item_ids[j]] = j;
  for (std::size_t i = 1; i < d.interactions.size(); ++i) {
    const auto& prev = d.interactions[i - 1];
    const auto& cur = d.interactions[i];
    if (prev.user != cur.user) continue;
    EXPECT_EQ(d.successor[index[prev.item]], index[cur.item]);
    EXPECT_LT(prev.timestamp, cur.timestamp);
  }
}

TEST(Synthetic, ClustersHoldUsers) {
  SyntheticConfig c;
  c.n_users = 100;
  c.n_items = 80;
  c.n_clusters = 2;
  c.cluster_affinity = 1.0;
  c.seed = 3;
  SyntheticDataset d = generate_synthetic(c);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < d.item_ids.size(); ++j) index[d.item_ids[j]] = j;
  std::map<std::string, std::set<std::size_t>> clusters;
  for (const auto& r : d.interactions) clusters[r.user].insert(d.item_cluster[index[r.item]]);
  for (const auto& [u, cs] : clusters) EXPECT_EQ(cs.size(), 1u) << u;
}

TEST(Synthetic, RejectsImpossibleLengths) {
  SyntheticConfig c;
  c.n_items = 10;
  c.max_length = 20;
  EXPECT_THROW(generate_synthetic(c), Error);
  c = SyntheticConfig{};
  c.min_length = 2;
  EXPECT_THROW(generate_synthetic(c), Error);
}

TEST(Synthetic, FilesParseBack) {
  testing::TempDir dir;
  SyntheticConfig c;
  c.n_users = 20;
  c.n_items = 30;
  c.max_length = 10;
  SyntheticDataset d = generate_synthetic(c);
  write_reviews_jsonl(dir / "r.jsonl", d.interactions);
  write_metadata_jsonl(dir / "m.jsonl", d.metadata);
  std::ifstream r(dir / "r.jsonl");
  ParseResult parsed = parse_interactions(r, InputFormat::kAmazonJsonl);
  EXPECT_EQ(parsed.interactions.size(), d.interactions.size());
  EXPECT_EQ(parsed.n_skipped, 0u);
  std::ifstream m(dir / "m.jsonl");
  MetadataResult meta = parse_metadata(m);
  EXPECT_EQ(meta.items.size(), d.metadata.size());
}

}  // namespace
}  // namespace recprompt
