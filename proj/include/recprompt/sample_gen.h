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

// Data-sample generation: sliding windows over leave-one-out splits, the
// six prompt families (retrieval, ranking, rating, MIM, MLM, BPR) plus item
// content (IE) samples, and JSONL corpus emission.
//
// Randomness is never shared between samples. Each sample owns a private
// stream seeded from (seed, task, split, user, window, epoch), so corpora are
// identical regardless of thread count, and bumping the epoch redraws only
// the dynamically sampled families (MIM, MLM, BPR).

#ifndef RECPROMPT_SAMPLE_GEN_H_
#define RECPROMPT_SAMPLE_GEN_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recprompt/common.h"
#include "recprompt/ingest.h"
#include "recprompt/io.h"
#include "recprompt/prompts.h"
#include "recprompt/rng.h"
#include "recprompt/sampling.h"
#include "recprompt/split.h"

namespace recprompt {

enum class Task { kRetrieval, kRanking, kRating, kMim, kMlm, kBpr, kIe };
enum class SplitKind { kTrain, kValid, kTest };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);
// Comma-separated task names; throws Error on an unknown name.
std::vector<Task> parse_task_list(std::string_view csv);
std::string_view split_name(SplitKind split);

// Retrieval, ranking and rating prediction.
bool is_recommendation_task(Task task);
// MIM, MLM and BPR: redrawn every epoch, train split only.
bool is_dynamic_task(Task task);

std::vector<Task> default_tasks();

struct GenConfig {
  std::string dataset = "dataset";
  std::size_t window_size = 20;
  double mask_ratio = 0.20;
  std::size_t pool_size = 100;
  std::uint64_t seed = 0;
  std::size_t epochs = 1;
  std::vector<Task> tasks = default_tasks();

  // Throws Error on w < 2, mask ratio outside (0, 1), pool < 2 or epochs < 1.
  void validate() const;
  bool enabled(Task task) const;
};

struct WindowSpec {
  UserIdx user = 0;
  SplitKind split = SplitKind::kTrain;
  std::size_t index = 0;  // 0-based position among the user's windows
  std::size_t start = 1;  // 1-based start offset into the train list
  std::vector<SequenceEntry> items;

  const SequenceEntry& target() const { return items.back(); }
  std::span<const SequenceEntry> history() const {
    return std::span<const SequenceEntry>(items).first(items.size() - 1);
  }
};

// max(1, L - w + 1) for L >= 1, 0 for an empty train list.
std::size_t train_window_count(std::size_t train_length, std::size_t window_size);

// Train: windows starting at k = 1..max(1, L-w+1), each of length min(w, L).
// Valid/test: one window ending at the held-out item, left-truncated to w.
std::vector<WindowSpec> user_windows(UserIdx user, const UserSplit& split,
                                     SplitKind kind, std::size_t window_size);

// Windows of every user in the split; the valid split covers only the
// validation users.
std::vector<WindowSpec> enumerate_windows(const DatasetSplit& split, SplitKind kind,
                                          std::size_t window_size);

struct SampleMeta {
  UserIdx user = 0;
  std::size_t window = 0;
  std::size_t epoch = 0;
  std::optional<std::string> target;
  std::vector<std::string> candidates;
};

struct DataSample {
  std::string id;
  Task task = Task::kRetrieval;
  SplitKind split = SplitKind::kTrain;
  std::string input;
  std::string output;
  SampleMeta meta;
};

nlohmann::ordered_json sample_to_json(const DataSample& sample);
DataSample sample_from_json(const nlohmann::json& j);

std::string sample_id(std::string_view dataset, Task task, SplitKind split, UserIdx user,
                      std::size_t window, std::optional<std::size_t> epoch);

// Resolves item indices to prompt text and tallies missing titles.
class RenderContext {
 public:
  RenderContext(const IdMap& ids, std::span<const ItemMetadata> catalog);

  prompts::ItemText item(ItemIdx item) const;
  const std::string& id(ItemIdx item) const { return ids_->display(item); }
  const IdMap& ids() const { return *ids_; }
  std::size_t missing_titles() const { return missing_titles_.load(); }

 private:
  const IdMap* ids_;
  std::span<const ItemMetadata> catalog_;
  mutable std::atomic<std::size_t> missing_titles_{0};
};

DataSample gen_retrieval(const WindowSpec& window, const RenderContext& ctx);

// Places the target at a uniformly random slot among the negatives.
std::vector<ItemIdx> insert_target(std::span<const ItemIdx> negatives, ItemIdx target,
                                   Rng& rng);

// Throws Error if the pool would contain duplicates.
DataSample gen_ranking(const WindowSpec& window, std::span<const ItemIdx> negatives,
                       const RenderContext& ctx, Rng& rng);

DataSample gen_rating(const WindowSpec& window, const RenderContext& ctx);

// clamp(round-half-up(ratio * len), 1, len - 1).
std::size_t mim_mask_count(std::size_t length, double mask_ratio);

DataSample gen_mim(const WindowSpec& window, const RenderContext& ctx, double mask_ratio,
                   Rng& rng);
// Renders a MIM sample for explicit 0-based mask positions.
DataSample render_mim(const WindowSpec& window, const RenderContext& ctx,
                      std::span<const std::size_t> mask_positions);

struct MlmSpan {
  std::size_t start = 0;  // 0-based
  std::size_t length = 0;
};
// Uniform start with at least two items remaining, then uniform length in
// [2, min(w, L - start)].
MlmSpan draw_mlm_span(std::size_t train_length, std::size_t window_size, Rng& rng);

DataSample gen_mlm(UserIdx user, std::span<const SequenceEntry> train,
                   std::size_t window_size, const RenderContext& ctx, Rng& rng);

// `user_items` is the user's full item set, sorted. Throws Error when the
// negative belongs to it.
DataSample gen_bpr(const WindowSpec& window, ItemIdx negative,
                   std::span<const ItemIdx> user_items, const RenderContext& ctx,
                   Rng& rng);

// One sample per populated content field.
std::vector<DataSample> gen_ie(ItemIdx item, const ItemMetadata& metadata,
                               const IdMap& ids, std::string_view dataset);

class SampleGenerator {
 public:
  SampleGenerator(const DatasetSplit& split, std::span<const ItemMetadata> catalog,
                  const IdMap& ids, const PopularityTable& popularity, GenConfig config);

  const GenConfig& config() const { return config_; }
  const RenderContext& context() const { return ctx_; }
  std::span<const ItemIdx> user_items(UserIdx user) const { return user_items_[user]; }

  // Users covered by a split (validation users for kValid, everyone else).
  std::vector<UserIdx> users(SplitKind split) const;

  // All samples of one task for one user. Dynamic tasks yield nothing outside
  // the train split; recommendation tasks ignore the epoch.
  std::vector<DataSample> user_samples(Task task, SplitKind split, UserIdx user,
                                       std::size_t epoch) const;

  // Streams every sample of (task, split, epoch) in user order. Generation
  // runs on up to `jobs` threads; delivery order does not depend on it.
  void for_each(Task task, SplitKind split, std::size_t epoch, std::size_t jobs,
                const std::function<void(const DataSample&)>& sink) const;

  std::vector<DataSample> collect(Task task, SplitKind split, std::size_t epoch,
                                  std::size_t jobs = 1) const;

  // The candidate pool of a ranking sample, rebuilt from its seed.
  std::vector<ItemIdx> ranking_candidates(const WindowSpec& window) const;

  std::vector<DataSample> ie_samples() const;

 private:
  Rng stream(Task task, const WindowSpec& window, std::size_t epoch) const;

  const DatasetSplit* split_;
  std::span<const ItemMetadata> catalog_;
  const IdMap* ids_;
  const PopularityTable* popularity_;
  GenConfig config_;
  RenderContext ctx_;
  std::vector<std::vector<ItemIdx>> user_items_;
};

struct CorpusFile {
  std::filesystem::path path;
  Task task = Task::kRetrieval;
  SplitKind split = SplitKind::kTrain;
  std::optional<std::size_t> epoch;
  std::size_t n_samples = 0;
  bool truth = false;
};

struct CorpusSummary {
  std::vector<CorpusFile> files;
  std::size_t missing_titles = 0;
  std::vector<std::string> warnings;
};

// {dataset}.{task}.{split}[.epoch{e}].jsonl
std::string corpus_file_name(std::string_view dataset, Task task, SplitKind split,
                             std::optional<std::size_t> epoch);
// {dataset}.{task}.{split}.truth.jsonl
std::string truth_file_name(std::string_view dataset, Task task, SplitKind split);

// Writes every enabled task's corpus files, plus truth files for the
// validation and test recommendation samples.
CorpusSummary generate_corpus(const SampleGenerator& generator,
                              const std::filesystem::path& out_dir,
                              const FileHeader& header, std::size_t jobs = 1);

}  // namespace recprompt

#endif  // RECPROMPT_SAMPLE_GEN_H_
