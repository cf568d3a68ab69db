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

#include "recprompt/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace recprompt {
namespace {

using testing::entries;

FactorModel random_model(std::size_t n_users, std::size_t n_items, std::size_t dim, double l2,
                         double scale, std::uint64_t seed) {
  BprHyperparams p;
  p.dim = dim;
  p.l2 = l2;
  p.init_scale = scale;
  return FactorModel::initialize(n_users, n_items, p, seed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(BprLoss, ZeroFactorsGiveLn2) {
  FactorModel m(1, 2, 8, 0.01, 0.05);
  EXPECT_NEAR(bpr_loss(m, 0, 0, 1), std::log(2.0), 1e-12);
}

TEST(BprLoss, LargeMarginVanishes) {
  FactorModel m(1, 2, 1, 0.0, 0.05);
  m.user(0)[0] = 1.0;
  for (double x : {10.0, 40.0, 200.0, 1000.0}) {
    m.item(0)[0] = x;
    m.item(1)[0] = 0.0;
    EXPECT_LT(bpr_loss(m, 0, 0, 1), std::exp(-x) * 1.0001 + 1e-300);
  }
  m.item(0)[0] = 1000.0;
  EXPECT_EQ(bpr_loss(m, 0, 0, 1), 0.0);
  m.item(0)[0] = -1000.0;
  EXPECT_NEAR(bpr_loss(m, 0, 0, 1), 1000.0, 1e-9);
}

TEST(BprLoss, MatchesDirectFormula) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    FactorModel m = random_model(3, 5, 6, 0.03, 0.8, seed);
    const double x = dot(m.user(1), m.item(2)) - dot(m.user(1), m.item(4));
    const double reg = 0.03 * (dot(m.user(1), m.user(1)) + dot(m.item(2), m.item(2)) +
                               dot(m.item(4), m.item(4)));
    EXPECT_NEAR(bpr_loss(m, 1, 2, 4), std::log1p(std::exp(-x)) + reg, 1e-12);
  }
}

// Central differences of bpr_loss over every parameter that enters it.
void check_gradient(FactorModel m, UserIdx u, ItemIdx p, ItemIdx n) {
  const BprGrad g = bpr_grad(m, u, p, n);
  const double h = 1e-5;
  auto check = [&](std::span<double> row, const std::vector<double>& analytic) {
    for (std::size_t d = 0; d < row.size(); ++d) {
      const double orig = row[d];
      row[d] = orig + h;
      const double up = bpr_loss(m, u, p, n);
      row[d] = orig - h;
      const double down = bpr_loss(m, u, p, n);
      row[d] = orig;
      const double numeric = (up - down) / (2 * h);
      const double denom = std::max({std::abs(numeric), std::abs(analytic[d]), 1e-6});
      EXPECT_LT(std::abs(numeric - analytic[d]) / denom, 1e-4) << "dim " << d;
    }
  };
  check(m.user(u), g.user);
  check(m.item(p), g.pos);
  check(m.item(n), g.neg);
}

TEST(BprGrad, FiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    check_gradient(random_model(2, 4, 5, 0.01 * (seed % 4), 1.0, seed), seed % 2, 1, 3);
  }
}

TEST(BprGrad, ZeroVectors) {
  FactorModel m(1, 2, 4, 0.1, 0.05);
  BprGrad g = bpr_grad(m, 0, 0, 1);
  for (double v : g.user) EXPECT_EQ(v, 0.0);
  for (double v : g.pos) EXPECT_EQ(v, 0.0);
  check_gradient(m, 0, 0, 1);
}

TEST(BprGrad, RegularizerOnlyWhenItemsEqual) {
  FactorModel m = random_model(1, 2, 3, 0.2, 1.0, 5);
  for (std::size_t d = 0; d < 3; ++d) m.item(1)[d] = m.item(0)[d];
  BprGrad g = bpr_grad(m, 0, 0, 1);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_NEAR(g.user[d], 0.4 * m.user(0)[d], 1e-15);
    EXPECT_NEAR(g.pos[d] + g.neg[d], 0.8 * m.item(0)[d], 1e-15);
  }
}

DatasetSplit clustered_split(std::size_t n_users, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<ItemIdx>> seqs;
  for (std::size_t u = 0; u < n_users; ++u) {
    const ItemIdx base = (u % 2) * 30;
    std::set<ItemIdx> used;
    std::vector<ItemIdx> seq;
    const std::size_t len = 6 + uniform_index(rng, 8);
    while (seq.size() < len) {
      ItemIdx i = base + static_cast<ItemIdx>(uniform_index(rng, 30));
      if (used.insert(i).second) seq.push_back(i);
    }
    seqs.push_back(seq);
  }
  return testing::make_split(seqs, 50);
}

TEST(TrainBpr, ZeroStepsIsInitialization) {
  DatasetSplit s = clustered_split(40, 1);
  PopularityTable pop = PopularityTable::from_split(s, 60);
  BprHyperparams p;
  p.dim = 4;
  p.steps = 0;
  FactorModel m = train_bpr_mf(s, pop, p, 7);
  FactorModel init = FactorModel::initialize(40, 60, p, 7);
  EXPECT_EQ(m, init);
}

TEST(TrainBpr, DeterministicAndImproving) {
  DatasetSplit s = clustered_split(200, 2);
  PopularityTable pop = PopularityTable::from_split(s, 60);
  BprHyperparams p;
  p.dim = 8;
  p.epochs = 3;
  p.learning_rate = 0.05;
  TrainReport r1, r2;
  FactorModel a = train_bpr_mf(s, pop, p, 3, &r1);
  FactorModel b = train_bpr_mf(s, pop, p, 3, &r2);
  EXPECT_EQ(a, b);
  ASSERT_EQ(r1.epoch_losses.size(), 3u);
  EXPECT_EQ(r1.steps, 3 * total_train_interactions(s));
  for (std::size_t e = 1; e < 3; ++e) EXPECT_LE(r1.epoch_losses[e], r1.epoch_losses[e - 1]);
  EXPECT_TRUE(a.all_finite());
  EXPECT_NE(a, train_bpr_mf(s, pop, p, 4));
}

TEST(TrainBpr, DivergenceIsFatal) {
  DatasetSplit s = clustered_split(40, 3);
  PopularityTable pop = PopularityTable::from_split(s, 60);
  BprHyperparams p;
  p.dim = 4;
  p.learning_rate = 1e200;
  p.init_scale = 1e10;
  EXPECT_THROW(train_bpr_mf(s, pop, p, 1), Error);
}

TEST(FactorModel, SaveLoad) {
  testing::TempDir dir;
  FactorModel m = random_model(3, 4, 2, 0.1, 0.5, 9);
  m.save(dir / "m.json", FileHeader::make(1, "abc"));
  EXPECT_EQ(FactorModel::load(dir / "m.json"), m);
}

TEST(Baselines, PopularityRankMatchesSort) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> counts(30);
    for (auto& c : counts) c = uniform_index(rng, 5);
    PopularityTable t(counts);
    std::vector<ItemIdx> idx(30);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](ItemIdx a, ItemIdx b) {
      return counts[a] != counts[b] ? counts[a] > counts[b] : a < b;
    });
    idx.resize(10);
    EXPECT_EQ(popularity_rank(t, 10), idx);
  }
}

TEST(Baselines, HistoryScore) {
  EXPECT_DOUBLE_EQ(history_score(entries({1, 2, 3}, {5, 4, 2})), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(history_score(entries({1, 2, 3}, {3, 1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(history_score({}), 0.5);
}

TEST(Baselines, MarkovChain) {
  MarkovTable t(5);
  t.add(0, 1);
  t.add(1, 2);
  t.add(2, 3);
  PopularityTable pop({1, 1, 1, 1, 9});
  EXPECT_EQ(markov_predict(t, pop, ItemIdx{1}, 1), (std::vector<ItemIdx>{2}));
  EXPECT_EQ(markov_predict(t, pop, ItemIdx{1}, 3), (std::vector<ItemIdx>{2, 4, 0}));
  EXPECT_EQ(markov_predict(t, pop, ItemIdx{3}, 2), (std::vector<ItemIdx>{4, 0}));
  EXPECT_EQ(markov_predict(t, pop, std::nullopt, 1), (std::vector<ItemIdx>{4}));
}

TEST(Baselines, MarkovMajoritySuccessor) {
  MarkovTable t(3);
  t.add(0, 1, 90);
  t.add(0, 2, 10);
  PopularityTable pop({1, 1, 50});
  EXPECT_EQ(markov_predict(t, pop, ItemIdx{0}, 2), (std::vector<ItemIdx>{1, 2}));
  MarkovRecommender rec(t, pop);
  auto h = entries({0});
  std::vector<ItemIdx> cands = {0, 1, 2};
  EXPECT_EQ(rank_candidates(rec, 0, h, cands, 3), (std::vector<ItemIdx>{1, 2, 0}));
}

TEST(Baselines, MarkovFromSplitUsesTrainOnly) {
  DatasetSplit s = testing::make_split({{0, 1, 2, 3, 4}});
  MarkovTable t = MarkovTable::from_split(s, 5);
  EXPECT_EQ(t.count(0, 1), 1u);
  EXPECT_EQ(t.count(1, 2), 1u);
  EXPECT_EQ(t.count(2, 3), 0u);
}

TEST(Baselines, RankingIsScaleInvariant) {
  FactorModel m = random_model(2, 30, 4, 0.0, 1.0, 12);
  std::vector<ItemIdx> cands(30);
  std::iota(cands.begin(), cands.end(), 0);
  BprMfRecommender rec(m);
  auto before = rank_candidates(rec, 1, {}, cands, 30);
  FactorModel scaled = m;
  scaled.scale(3.5);
  BprMfRecommender rec2(scaled);
  EXPECT_EQ(rank_candidates(rec2, 1, {}, cands, 30), before);
}

TEST(Baselines, TiesBreakByIndex) {
  PopularityTable pop({2, 2, 2, 2});
  PopularityRecommender rec(pop);
  std::vector<ItemIdx> cands = {3, 1, 2, 0};
  EXPECT_EQ(rank_candidates(rec, 0, {}, cands, 2), (std::vector<ItemIdx>{0, 1}));
}

class EmitTest : public ::testing::Test {
 protected:
  void SetUp() override {
    split_ = clustered_split(120, 4);
    ids_ = testing::plain_ids(60);
    catalog_ = testing::plain_catalog(60);
    pop_ = PopularityTable::from_split(split_, 60);
    config_.dataset = "toy";
    config_.pool_size = 20;
    config_.seed = 5;
  }
  DatasetSplit split_;
  IdMap ids_;
  std::vector<ItemMetadata> catalog_;
  PopularityTable pop_;
  GenConfig config_;
};

TEST_F(EmitTest, Shapes) {
  SampleGenerator gen(split_, catalog_, ids_, pop_, config_);
  BprHyperparams p;
  p.dim = 4;
  p.epochs = 1;
  FactorModel m = train_bpr_mf(split_, pop_, p, 1);
  BprMfRecommender rec(m);

  auto retrieval = emit_predictions(rec, gen, split_, Task::kRetrieval, SplitKind::kTest, 20);
  ASSERT_EQ(retrieval.size(), 120u);
  for (std::size_t u = 0; u < retrieval.size(); ++u) {
    const auto& r = retrieval[u];
    EXPECT_EQ(r.sample_id, sample_id("toy", Task::kRetrieval, SplitKind::kTest, u, 0, std::nullopt));
    ASSERT_EQ(r.items.size(), 20u);
    EXPECT_EQ(std::set<std::string>(r.items.begin(), r.items.end()).size(), 20u);
    for (const auto& e : split_.users[u].train) {
      EXPECT_EQ(std::count(r.items.begin(), r.items.end(), ids_.display(e.item)), 0);
    }
    EXPECT_EQ(std::count(r.items.begin(), r.items.end(), ids_.display(split_.users[u].valid.item)), 0);
  }

  auto samples = gen.collect(Task::kRanking, SplitKind::kTest, 0);
  auto ranking = emit_predictions(rec, gen, split_, Task::kRanking, SplitKind::kTest, 20);
  ASSERT_EQ(ranking.size(), samples.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    auto got = ranking[i].items;
    auto pool = samples[i].meta.candidates;
    ASSERT_EQ(got.size(), 20u);
    std::sort(got.begin(), got.end());
    std::sort(pool.begin(), pool.end());
    EXPECT_EQ(got, pool);
  }

  auto rating = emit_predictions(rec, gen, split_, Task::kRating, SplitKind::kValid, 20);
  EXPECT_EQ(rating.size(), 50u);
  for (const auto& r : rating) {
    ASSERT_TRUE(r.score.has_value());
    EXPECT_GE(*r.score, 0.0);
    EXPECT_LE(*r.score, 1.0);
  }

  EXPECT_THROW(emit_predictions(rec, gen, split_, Task::kMim, SplitKind::kTest, 20), Error);
  EXPECT_THROW(emit_predictions(rec, gen, split_, Task::kRetrieval, SplitKind::kTrain, 20), Error);
  EXPECT_EQ(emit_predictions(rec, gen, split_, Task::kRetrieval, SplitKind::kTest, 20, 3).size(),
            120u);
}

}  // namespace
}  // namespace recprompt
