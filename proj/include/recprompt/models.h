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

// Reference recommenders: popularity, History, first-order Markov and a
// matrix factorisation trained with the BPR objective.

#ifndef RECPROMPT_MODELS_H_
#define RECPROMPT_MODELS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recprompt/common.h"
#include "recprompt/metrics.h"
#include "recprompt/sample_gen.h"
#include "recprompt/sampling.h"
#include "recprompt/split.h"

namespace recprompt {

struct BprHyperparams {
  std::size_t dim = 32;
  double learning_rate = 0.05;
  double l2 = 1e-4;
  std::size_t epochs = 30;
  double init_scale = 0.05;
  // Overrides epochs * |train pairs| when set.
  std::optional<std::size_t> steps;
};

// Row-major user and item factor matrices.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(std::size_t n_users, std::size_t n_items, std::size_t dim, double l2,
              double learning_rate);

  // Entries uniform in [-scale, scale].
  static FactorModel initialize(std::size_t n_users, std::size_t n_items,
                                const BprHyperparams& params, std::uint64_t seed);

  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }
  std::size_t dim() const { return dim_; }
  double l2() const { return l2_; }
  double learning_rate() const { return learning_rate_; }

  std::span<double> user(UserIdx u) { return {users_.data() + u * dim_, dim_}; }
  std::span<const double> user(UserIdx u) const { return {users_.data() + u * dim_, dim_}; }
  std::span<double> item(ItemIdx i) { return {items_.data() + i * dim_, dim_}; }
  std::span<const double> item(ItemIdx i) const { return {items_.data() + i * dim_, dim_}; }

  double score(UserIdx u, ItemIdx i) const;
  bool all_finite() const;
  void scale(double factor);

  const std::vector<double>& user_data() const { return users_; }
  const std::vector<double>& item_data() const { return items_; }

  void save(const std::filesystem::path& path, const FileHeader& header) const;
  static FactorModel load(const std::filesystem::path& path);

  bool operator==(const FactorModel&) const = default;

 private:
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::size_t dim_ = 0;
  double l2_ = 0.0;
  double learning_rate_ = 0.0;
  std::vector<double> users_;
  std::vector<double> items_;
};

// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

double bpr_loss(const FactorModel& model, UserIdx u, ItemIdx pos, ItemIdx neg);

struct BprGrad {
  std::vector<double> user;
  std::vector<double> pos;
  std::vector<double> neg;
};
BprGrad bpr_grad(const FactorModel& model, UserIdx u, ItemIdx pos, ItemIdx neg);

struct TrainReport {
  std::size_t steps = 0;
  std::vector<double> epoch_losses;  // mean loss per epoch
};

// Plain SGD over uniformly drawn (user, train item) pairs, one popularity
// negative per step drawn outside the user's full item set. Throws Error when
// a parameter stops being finite.
FactorModel train_bpr_mf(const DatasetSplit& split, const PopularityTable& popularity,
                         const BprHyperparams& params, std::uint64_t seed,
                         TrainReport* report = nullptr);

// The k most-interacted items, ties by index.
std::vector<ItemIdx> popularity_rank(const PopularityTable& popularity, std::size_t k);

// Fraction of liked (rating > 3) entries; 0.5 for an empty history.
double history_score(std::span<const SequenceEntry> history);

class MarkovTable {
 public:
  MarkovTable() = default;
  explicit MarkovTable(std::size_t n_items) : successors_(n_items) {}

  static MarkovTable from_split(const DatasetSplit& split, std::size_t n_items);

  void add(ItemIdx from, ItemIdx to, std::uint64_t count = 1);
  std::size_t n_items() const { return successors_.size(); }
  // (successor, count) sorted by successor.
  std::span<const std::pair<ItemIdx, std::uint64_t>> successors(ItemIdx item) const {
    return successors_[item];
  }
  std::uint64_t count(ItemIdx from, ItemIdx to) const;

 private:
  std::vector<std::vector<std::pair<ItemIdx, std::uint64_t>>> successors_;
};

// Successors by count (ties by index), padded with popular items.
std::vector<ItemIdx> markov_predict(const MarkovTable& table, const PopularityTable& popularity,
                                    std::optional<ItemIdx> last_item, std::size_t k);

// Scores candidates for one user; larger is better. Orderings break ties by
// item index.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual std::string_view name() const = 0;
  virtual void score(UserIdx user, std::span<const SequenceEntry> history,
                     std::span<const ItemIdx> candidates, std::span<double> out) const = 0;
  // In [0, 1].
  virtual double rating_score(UserIdx user, std::span<const SequenceEntry> history,
                              ItemIdx target) const = 0;
};

// Best-first top k (all when k >= size) of `candidates`.
std::vector<ItemIdx> rank_candidates(const Recommender& model, UserIdx user,
                                     std::span<const SequenceEntry> history,
                                     std::span<const ItemIdx> candidates, std::size_t k);

class PopularityRecommender : public Recommender {
 public:
  explicit PopularityRecommender(const PopularityTable& popularity) : pop_(&popularity) {}
  std::string_view name() const override { return "popularity"; }
  void score(UserIdx user, std::span<const SequenceEntry> history,
             std::span<const ItemIdx> candidates, std::span<double> out) const override;
  double rating_score(UserIdx user, std::span<const SequenceEntry> history,
                      ItemIdx target) const override;

 private:
  const PopularityTable* pop_;
};

// Ranks like popularity; rates by the user's like fraction.
class HistoryRecommender : public PopularityRecommender {
 public:
  using PopularityRecommender::PopularityRecommender;
  std::string_view name() const override { return "history"; }
  double rating_score(UserIdx user, std::span<const SequenceEntry> history,
                      ItemIdx target) const override;
};

class MarkovRecommender : public Recommender {
 public:
  MarkovRecommender(const MarkovTable& table, const PopularityTable& popularity)
      : table_(&table), pop_(&popularity) {}
  std::string_view name() const override { return "markov"; }
  void score(UserIdx user, std::span<const SequenceEntry> history,
             std::span<const ItemIdx> candidates, std::span<double> out) const override;
  double rating_score(UserIdx user, std::span<const SequenceEntry> history,
                      ItemIdx target) const override;

 private:
  const MarkovTable* table_;
  const PopularityTable* pop_;
};

class BprMfRecommender : public Recommender {
 public:
  explicit BprMfRecommender(const FactorModel& model) : model_(&model) {}
  std::string_view name() const override { return "bpr-mf"; }
  void score(UserIdx user, std::span<const SequenceEntry> history,
             std::span<const ItemIdx> candidates, std::span<double> out) const override;
  double rating_score(UserIdx user, std::span<const SequenceEntry> history,
                      ItemIdx target) const override;

 private:
  const FactorModel* model_;
};

// One record per (validation or test) window of `task`, ids matching the
// corpus. Retrieval ranks the whole catalog minus the user's history, ranking
// re-ranks the regenerated candidate pool, rating emits a score.
std::vector<PredictionRecord> emit_predictions(const Recommender& model,
                                               const SampleGenerator& generator,
                                               const DatasetSplit& split, Task task,
                                               SplitKind kind, std::size_t k_max,
                                               std::size_t jobs = 1);

}  // namespace recprompt

#endif  // RECPROMPT_MODELS_H_
