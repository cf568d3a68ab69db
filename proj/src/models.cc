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
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace recprompt {

using json = nlohmann::json;

FactorModel::FactorModel(std::size_t n_users, std::size_t n_items, std::size_t dim,
                         double l2, double learning_rate)
    : n_users_(n_users),
      n_items_(n_items),
      dim_(dim),
      l2_(l2),
      learning_rate_(learning_rate),
      users_(n_users * dim, 0.0),
      items_(n_items * dim, 0.0) {
  if (dim == 0) throw Error("factor dimension must be >= 1");
  if (l2 < 0.0) throw Error("l2 must be >= 0");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be > 0");
}

FactorModel FactorModel::initialize(std::size_t n_users, std::size_t n_items,
                                    const BprHyperparams& params, std::uint64_t seed) {
  FactorModel m(n_users, n_items, params.dim, params.l2, params.learning_rate);
  Rng rng(derive_seed(seed, "bpr-mf.init"));
  for (auto& v : m.users_) v = params.init_scale * (2.0 * uniform_unit(rng) - 1.0);
  for (auto& v : m.items_) v = params.init_scale * (2.0 * uniform_unit(rng) - 1.0);
  return m;
}

double FactorModel::score(UserIdx u, ItemIdx i) const {
  auto a = user(u);
  auto b = item(i);
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool FactorModel::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(users_.begin(), users_.end(), finite) &&
         std::all_of(items_.begin(), items_.end(), finite);
}

void FactorModel::scale(double factor) {
  for (auto& v : users_) v *= factor;
  for (auto& v : items_) v *= factor;
}

void FactorModel::save(const std::filesystem::path& path, const FileHeader& header) const {
  nlohmann::ordered_json j;
  j["header"] = header.to_json();
  j["n_users"] = n_users_;
  j["n_items"] = n_items_;
  j["dim"] = dim_;
  j["l2"] = l2_;
  j["learning_rate"] = learning_rate_;
  j["user_factors"] = users_;
  j["item_factors"] = items_;
  write_json_document(path, j);
}

FactorModel FactorModel::load(const std::filesystem::path& path) {
  json j = read_json_document(path);
  try {
    FactorModel m(j.at("n_users").get<std::size_t>(), j.at("n_items").get<std::size_t>(),
                  j.at("dim").get<std::size_t>(), j.at("l2").get<double>(),
                  j.at("learning_rate").get<double>());
    m.users_ = j.at("user_factors").get<std::vector<double>>();
    m.items_ = j.at("item_factors").get<std::vector<double>>();
    if (m.users_.size() != m.n_users_ * m.dim_ || m.items_.size() != m.n_items_ * m.dim_) {
      throw Error("factor matrix shape mismatch");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed model: " + e.what());
  }
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

double bpr_loss(const FactorModel& model, UserIdx u, ItemIdx pos, ItemIdx neg) {
  const double x = model.score(u, pos) - model.score(u, neg);
  // -log sigma(x) = softplus(-x)
  return softplus(-x) + model.l2() * (squared_norm(model.user(u)) +
                                      squared_norm(model.item(pos)) +
                                      squared_norm(model.item(neg)));
}

BprGrad bpr_grad(const FactorModel& model, UserIdx u, ItemIdx pos, ItemIdx neg) {
  const double x = model.score(u, pos) - model.score(u, neg);
  const double g = -sigmoid(-x);
  const double r = 2.0 * model.l2();
  auto uu = model.user(u);
  auto ip = model.item(pos);
  auto in = model.item(neg);
  const std::size_t d = model.dim();
  BprGrad grad{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t k = 0; k < d; ++k) {
    grad.user[k] = g * (ip[k] - in[k]) + r * uu[k];
    grad.pos[k] = g * uu[k] + r * ip[k];
    grad.neg[k] = -g * uu[k] + r * in[k];
  }
  return grad;
}

FactorModel train_bpr_mf(const DatasetSplit& split, const PopularityTable& popularity,
                         const BprHyperparams& params, std::uint64_t seed,
                         TrainReport* report) {
  std::vector<std::pair<UserIdx, ItemIdx>> pairs;
  std::vector<std::vector<ItemIdx>> user_items(split.users.size());
  for (UserIdx u = 0; u < split.users.size(); ++u) {
    for (const auto& e : split.users[u].train) pairs.emplace_back(u, e.item);
    user_items[u] = user_item_set(split.users[u]);
  }
  if (pairs.empty()) throw Error("cannot train on an empty split");

  FactorModel model =
      FactorModel::initialize(split.users.size(), popularity.n_items(), params, seed);
  const std::size_t per_epoch = pairs.size();
  const std::size_t total = params.steps ? *params.steps : params.epochs * per_epoch;
  Rng rng(derive_seed(seed, "bpr-mf.sgd"));
  const double lr = params.learning_rate;
  const std::size_t d = params.dim;

  TrainReport local;
  double epoch_loss = 0.0;
  std::size_t epoch_steps = 0;
  auto close_epoch = [&](std::size_t step) {
    if (epoch_steps == 0) return;
    local.epoch_losses.push_back(epoch_loss / static_cast<double>(epoch_steps));
    if (!model.all_finite() || !std::isfinite(local.epoch_losses.back())) {
      throw Error("BPR-MF diverged after step " + std::to_string(step) +
                  " (non-finite parameter or loss); lower the learning rate");
    }
    epoch_loss = 0.0;
    epoch_steps = 0;
  };

  for (std::size_t step = 0; step < total; ++step) {
    const auto [u, pos] = pairs[uniform_index(rng, pairs.size())];
    const ItemIdx neg = sample_negatives_by_popularity(user_items[u], popularity, 1, rng)[0];
    epoch_loss += bpr_loss(model, u, pos, neg);
    ++epoch_steps;
    const BprGrad g = bpr_grad(model, u, pos, neg);
    auto uu = model.user(u);
    auto ip = model.item(pos);
    auto in = model.item(neg);
    for (std::size_t k = 0; k < d; ++k) {
      uu[k] -= lr * g.user[k];
      ip[k] -= lr * g.pos[k];
      in[k] -= lr * g.neg[k];
    }
    if ((step + 1) % per_epoch == 0) close_epoch(step + 1);
  }
  close_epoch(total);
  local.steps = total;
  if (report) *report = std::move(local);
  return model;
}

std::vector<ItemIdx> popularity_rank(const PopularityTable& popularity, std::size_t k) {
  std::vector<ItemIdx> items(popularity.n_items());
  std::iota(items.begin(), items.end(), ItemIdx{0});
  k = std::min(k, items.size());
  std::partial_sort(items.begin(), items.begin() + k, items.end(), [&](ItemIdx a, ItemIdx b) {
    if (popularity.count(a) != popularity.count(b)) {
      return popularity.count(a) > popularity.count(b);
    }
    return a < b;
  });
  items.resize(k);
  return items;
}

double history_score(std::span<const SequenceEntry> history) {
  if (history.empty()) return 0.5;
  std::size_t liked = 0;
  for (const auto& e : history) liked += e.rating > 3.0 ? 1 : 0;
  return static_cast<double>(liked) / static_cast<double>(history.size());
}

MarkovTable MarkovTable::from_split(const DatasetSplit& split, std::size_t n_items) {
  MarkovTable t(n_items);
  for (const auto& u : split.users) {
    for (std::size_t i = 1; i < u.train.size(); ++i) t.add(u.train[i - 1].item, u.train[i].item);
  }
  return t;
}

void MarkovTable::add(ItemIdx from, ItemIdx to, std::uint64_t count) {
  if (from >= successors_.size() || to >= successors_.size()) {
    throw Error("markov transition outside the catalog");
  }
  auto& row = successors_[from];
  auto it = std::lower_bound(row.begin(), row.end(), to,
                             [](const auto& p, ItemIdx v) { return p.first < v; });
  if (it != row.end() && it->first == to) {
    it->second += count;
  } else {
    row.insert(it, {to, count});
  }
}

std::uint64_t MarkovTable::count(ItemIdx from, ItemIdx to) const {
  const auto& row = successors_.at(from);
  auto it = std::lower_bound(row.begin(), row.end(), to,
                             [](const auto& p, ItemIdx v) { return p.first < v; });
  return it != row.end() && it->first == to ? it->second : 0;
}

std::vector<ItemIdx> markov_predict(const MarkovTable& table, const PopularityTable& popularity,
                                    std::optional<ItemIdx> last_item, std::size_t k) {
  std::vector<ItemIdx> out;
  if (last_item && *last_item < table.n_items()) {
    std::vector<std::pair<ItemIdx, std::uint64_t>> row(table.successors(*last_item).begin(),
                                                       table.successors(*last_item).end());
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < row.size() && out.size() < k; ++i) out.push_back(row[i].first);
  }
  if (out.size() < k) {
    std::vector<ItemIdx> listed = out;
    std::sort(listed.begin(), listed.end());
    for (ItemIdx item : popularity_rank(popularity, popularity.n_items())) {
      if (out.size() >= k) break;
      if (!std::binary_search(listed.begin(), listed.end(), item)) out.push_back(item);
    }
  }
  return out;
}

std::vector<ItemIdx> rank_candidates(const Recommender& model, UserIdx user,
                                     std::span<const SequenceEntry> history,
                                     std::span<const ItemIdx> candidates, std::size_t k) {
  std::vector<double> scores(candidates.size());
  model.score(user, history, candidates, scores);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return candidates[a] < candidates[b];
                    });
  std::vector<ItemIdx> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = candidates[order[i]];
  return out;
}

void PopularityRecommender::score(UserIdx, std::span<const SequenceEntry>,
                                  std::span<const ItemIdx> candidates,
                                  std::span<double> out) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out[i] = static_cast<double>(pop_->count(candidates[i]));
  }
}

double PopularityRecommender::rating_score(UserIdx, std::span<const SequenceEntry>,
                                           ItemIdx target) const {
  return pop_->total() == 0 ? 0.0 : pop_->probability(target);
}

double HistoryRecommender::rating_score(UserIdx, std::span<const SequenceEntry> history,
                                        ItemIdx) const {
  return history_score(history);
}

void MarkovRecommender::score(UserIdx, std::span<const SequenceEntry> history,
                              std::span<const ItemIdx> candidates,
                              std::span<double> out) const {
  // Successor count dominates; popularity breaks ties within a count.
  const double scale = static_cast<double>(pop_->total()) + 1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double follow =
        history.empty() ? 0.0
                        : static_cast<double>(table_->count(history.back().item, candidates[i]));
    out[i] = follow * scale + static_cast<double>(pop_->count(candidates[i]));
  }
}

double MarkovRecommender::rating_score(UserIdx, std::span<const SequenceEntry> history,
                                       ItemIdx) const {
  return history_score(history);
}

void BprMfRecommender::score(UserIdx user, std::span<const SequenceEntry>,
                             std::span<const ItemIdx> candidates, std::span<double> out) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = model_->score(user, candidates[i]);
}

double BprMfRecommender::rating_score(UserIdx user, std::span<const SequenceEntry>,
                                      ItemIdx target) const {
  return sigmoid(model_->score(user, target));
}

namespace {

std::vector<PredictionRecord> user_predictions(const Recommender& model,
                                               const SampleGenerator& generator,
                                               const DatasetSplit& split, Task task,
                                               SplitKind kind, std::size_t k_max,
                                               UserIdx user) {
  std::vector<PredictionRecord> out;
  const auto& us = split.users.at(user);
  std::vector<SequenceEntry> history = us.train;
  if (kind == SplitKind::kTest) history.push_back(us.valid);
  const std::size_t n_items = generator.context().ids().size();
  for (const auto& w : user_windows(user, us, kind, generator.config().window_size)) {
    PredictionRecord r;
    r.sample_id = sample_id(generator.config().dataset, task, kind, user, w.index, std::nullopt);
    const ItemIdx target = w.target().item;
    if (task == Task::kRating) {
      r.score = model.rating_score(user, history, target);
    } else {
      std::vector<ItemIdx> candidates;
      if (task == Task::kRetrieval) {
        std::vector<ItemIdx> seen;
        for (const auto& e : history) seen.push_back(e.item);
        std::sort(seen.begin(), seen.end());
        for (ItemIdx i = 0; i < n_items; ++i) {
          if (!std::binary_search(seen.begin(), seen.end(), i)) candidates.push_back(i);
        }
      } else {
        candidates = generator.ranking_candidates(w);
      }
      const std::size_t k = task == Task::kRanking ? candidates.size() : k_max;
      for (ItemIdx i : rank_candidates(model, user, history, candidates, k)) {
        r.items.push_back(generator.context().id(i));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<PredictionRecord> emit_predictions(const Recommender& model,
                                               const SampleGenerator& generator,
                                               const DatasetSplit& split, Task task,
                                               SplitKind kind, std::size_t k_max,
                                               std::size_t jobs) {
  if (!is_recommendation_task(task)) {
    throw Error("no predictions for task '" + std::string(task_name(task)) + "'");
  }
  if (kind == SplitKind::kTrain) throw Error("predictions are emitted for valid/test only");
  const auto users = generator.users(kind);
  std::vector<std::vector<PredictionRecord>> per_user(users.size());
  jobs = std::max<std::size_t>(1, std::min(jobs, users.size()));
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&](std::size_t worker) {
    try {
      for (std::size_t i = worker; i < users.size(); i += jobs) {
        per_user[i] = user_predictions(model, generator, split, task, kind, k_max, users[i]);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(work, t);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<PredictionRecord> out;
  for (auto& block : per_user) {
    for (auto& r : block) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace recprompt
