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

#include "recprompt/sample_gen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <numeric>
#include <thread>

namespace recprompt {

namespace {

constexpr Task kAllTasks[] = {Task::kRetrieval, Task::kRanking, Task::kRating,
                              Task::kMim,       Task::kMlm,     Task::kBpr,
                              Task::kIe};

std::vector<prompts::ItemText> render_items(std::span<const SequenceEntry> entries,
                                            const RenderContext& ctx) {
  std::vector<prompts::ItemText> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(ctx.item(e.item));
  return out;
}

DataSample base_sample(Task task, const WindowSpec& window) {
  DataSample s;
  s.task = task;
  s.split = window.split;
  s.meta.user = window.user;
  s.meta.window = window.index;
  return s;
}

std::string format_price(double price) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", price);
  return buf;
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kRetrieval: return "retrieval";
    case Task::kRanking: return "ranking";
    case Task::kRating: return "rating";
    case Task::kMim: return "mim";
    case Task::kMlm: return "mlm";
    case Task::kBpr: return "bpr";
    case Task::kIe: return "ie";
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : kAllTasks) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

std::vector<Task> parse_task_list(std::string_view csv) {
  std::vector<Task> tasks;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view name = csv.substr(pos, comma - pos);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      auto t = parse_task(name);
      if (!t) throw Error("unknown task '" + std::string(name) + "'");
      if (std::find(tasks.begin(), tasks.end(), *t) == tasks.end()) tasks.push_back(*t);
    }
    pos = comma + 1;
  }
  return tasks;
}

std::string_view split_name(SplitKind split) {
  switch (split) {
    case SplitKind::kTrain: return "train";
    case SplitKind::kValid: return "valid";
    case SplitKind::kTest: return "test";
  }
  return "unknown";
}

bool is_recommendation_task(Task task) {
  return task == Task::kRetrieval || task == Task::kRanking || task == Task::kRating;
}

bool is_dynamic_task(Task task) {
  return task == Task::kMim || task == Task::kMlm || task == Task::kBpr;
}

std::vector<Task> default_tasks() {
  return {Task::kRetrieval, Task::kRanking, Task::kRating,
          Task::kMim,       Task::kMlm,     Task::kBpr};
}

void GenConfig::validate() const {
  if (window_size < 2) throw Error("window size must be >= 2");
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
    throw Error("mask ratio must lie strictly between 0 and 1");
  }
  if (pool_size < 2) throw Error("candidate pool size must be >= 2");
  if (epochs < 1) throw Error("epochs must be >= 1");
}

bool GenConfig::enabled(Task task) const {
  return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

std::size_t train_window_count(std::size_t train_length, std::size_t window_size) {
  if (train_length == 0) return 0;
  if (train_length < window_size) return 1;
  return train_length - window_size + 1;
}

std::vector<WindowSpec> user_windows(UserIdx user, const UserSplit& split,
                                     SplitKind kind, std::size_t window_size) {
  std::vector<WindowSpec> out;
  if (kind == SplitKind::kTrain) {
    const std::size_t n = train_window_count(split.train.size(), window_size);
    const std::size_t len = std::min(window_size, split.train.size());
    for (std::size_t k = 0; k < n; ++k) {
      WindowSpec w;
      w.user = user;
      w.split = kind;
      w.index = k;
      w.start = k + 1;
      w.items.assign(split.train.begin() + static_cast<std::ptrdiff_t>(k),
                     split.train.begin() + static_cast<std::ptrdiff_t>(k + len));
      out.push_back(std::move(w));
    }
    return out;
  }
  std::vector<SequenceEntry> full = split.train;
  full.push_back(split.valid);
  if (kind == SplitKind::kTest) full.push_back(split.test);
  const std::size_t len = std::min(window_size, full.size());
  WindowSpec w;
  w.user = user;
  w.split = kind;
  w.index = 0;
  w.start = full.size() - len + 1;
  w.items.assign(full.end() - static_cast<std::ptrdiff_t>(len), full.end());
  out.push_back(std::move(w));
  return out;
}

std::vector<WindowSpec> enumerate_windows(const DatasetSplit& split, SplitKind kind,
                                          std::size_t window_size) {
  std::vector<WindowSpec> out;
  auto add = [&](UserIdx u) {
    auto ws = user_windows(u, split.users[u], kind, window_size);
    std::move(ws.begin(), ws.end(), std::back_inserter(out));
  };
  if (kind == SplitKind::kValid) {
    for (UserIdx u : split.valid_users) add(u);
  } else {
    for (std::size_t u = 0; u < split.users.size(); ++u) add(static_cast<UserIdx>(u));
  }
  return out;
}

nlohmann::ordered_json sample_to_json(const DataSample& sample) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["task"] = task_name(sample.task);
  j["input"] = sample.input;
  j["output"] = sample.output;
  nlohmann::ordered_json meta;
  meta["user"] = sample.meta.user;
  meta["window"] = sample.meta.window;
  meta["epoch"] = sample.meta.epoch;
  if (sample.meta.target) {
    meta["target"] = *sample.meta.target;
  } else {
    meta["target"] = nullptr;
  }
  meta["candidates"] = sample.meta.candidates;
  j["meta"] = std::move(meta);
  return j;
}

DataSample sample_from_json(const nlohmann::json& j) {
  DataSample s;
  s.id = j.at("id").get<std::string>();
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task) throw Error("sample " + s.id + " has an unknown task");
  s.task = *task;
  s.input = j.at("input").get<std::string>();
  s.output = j.at("output").get<std::string>();
  const auto& meta = j.at("meta");
  s.meta.user = meta.at("user").get<UserIdx>();
  s.meta.window = meta.at("window").get<std::size_t>();
  s.meta.epoch = meta.at("epoch").get<std::size_t>();
  if (!meta.at("target").is_null()) s.meta.target = meta["target"].get<std::string>();
  s.meta.candidates = meta.at("candidates").get<std::vector<std::string>>();
  return s;
}

std::string sample_id(std::string_view dataset, Task task, SplitKind split, UserIdx user,
                      std::size_t window, std::optional<std::size_t> epoch) {
  std::string id(dataset);
  id += '.';
  id += task_name(task);
  id += '.';
  id += split_name(split);
  id += ".u" + std::to_string(user);
  id += ".w" + std::to_string(window);
  if (epoch) id += ".e" + std::to_string(*epoch);
  return id;
}

RenderContext::RenderContext(const IdMap& ids, std::span<const ItemMetadata> catalog)
    : ids_(&ids), catalog_(catalog) {}

prompts::ItemText RenderContext::item(ItemIdx item) const {
  std::string_view title;
  if (item < catalog_.size() && !catalog_[item].title_missing) {
    title = catalog_[item].title;
  } else {
    missing_titles_.fetch_add(1, std::memory_order_relaxed);
  }
  return prompts::ItemText{ids_->display(item), title};
}

DataSample gen_retrieval(const WindowSpec& window, const RenderContext& ctx) {
  if (window.items.size() < 2) throw Error("retrieval needs a window of length >= 2");
  DataSample s = base_sample(Task::kRetrieval, window);
  auto history = render_items(window.history(), ctx);
  s.input = prompts::retrieval_input(history);
  s.output = ctx.id(window.target().item);
  s.meta.target = s.output;
  return s;
}

std::vector<ItemIdx> insert_target(std::span<const ItemIdx> negatives, ItemIdx target,
                                   Rng& rng) {
  std::vector<ItemIdx> pool(negatives.begin(), negatives.end());
  const std::size_t slot = uniform_index(rng, pool.size() + 1);
  pool.insert(pool.begin() + static_cast<std::ptrdiff_t>(slot), target);
  return pool;
}

DataSample gen_ranking(const WindowSpec& window, std::span<const ItemIdx> negatives,
                       const RenderContext& ctx, Rng& rng) {
  if (window.items.size() < 2) throw Error("ranking needs a window of length >= 2");
  const ItemIdx target = window.target().item;
  auto pool = insert_target(negatives, target, rng);
  std::vector<ItemIdx> sorted = pool;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("duplicate candidate in ranking pool for user " +
                std::to_string(window.user));
  }
  DataSample s = base_sample(Task::kRanking, window);
  s.meta.candidates.reserve(pool.size());
  for (ItemIdx i : pool) s.meta.candidates.push_back(ctx.id(i));
  auto history = render_items(window.history(), ctx);
  s.input = prompts::ranking_input(history, s.meta.candidates);
  s.output = ctx.id(target);
  s.meta.target = s.output;
  return s;
}

DataSample gen_rating(const WindowSpec& window, const RenderContext& ctx) {
  if (window.items.size() < 2) throw Error("rating needs a window of length >= 2");
  std::vector<prompts::ItemText> likes, dislikes;
  for (const auto& e : window.history()) {
    (e.rating > 3.0 ? likes : dislikes).push_back(ctx.item(e.item));
  }
  DataSample s = base_sample(Task::kRating, window);
  const auto& target = window.target();
  s.input = prompts::rating_input(likes, dislikes, ctx.item(target.item));
  s.output = target.rating > 3.0 ? "yes" : "no";
  s.meta.target = ctx.id(target.item);
  return s;
}

std::size_t mim_mask_count(std::size_t length, double mask_ratio) {
  if (length < 2) throw Error("MIM needs a window of length >= 2");
  auto m = static_cast<std::size_t>(std::floor(mask_ratio * static_cast<double>(length) + 0.5));
  return std::clamp<std::size_t>(m, 1, length - 1);
}

DataSample render_mim(const WindowSpec& window, const RenderContext& ctx,
                      std::span<const std::size_t> mask_positions) {
  const std::size_t len = window.items.size();
  std::vector<bool> masked(len, false);
  for (std::size_t p : mask_positions) {
    if (p >= len) throw Error("mask position out of range");
    masked[p] = true;
  }
  auto items = render_items(window.items, ctx);
  std::vector<prompts::ItemText> answers;
  for (std::size_t i = 0; i < len; ++i) {
    if (masked[i]) answers.push_back(items[i]);
  }
  // std::vector<bool> has no contiguous storage.
  std::unique_ptr<bool[]> flags(new bool[len]);
  for (std::size_t i = 0; i < len; ++i) flags[i] = masked[i];
  DataSample s = base_sample(Task::kMim, window);
  s.input = prompts::mim_input(items, std::span<const bool>(flags.get(), len));
  s.output = prompts::mim_output(answers);
  return s;
}

DataSample gen_mim(const WindowSpec& window, const RenderContext& ctx, double mask_ratio,
                   Rng& rng) {
  const std::size_t len = window.items.size();
  const std::size_t m = mim_mask_count(len, mask_ratio);
  std::vector<std::size_t> positions(len);
  std::iota(positions.begin(), positions.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + uniform_index(rng, len - i);
    std::swap(positions[i], positions[j]);
  }
  positions.resize(m);
  std::sort(positions.begin(), positions.end());
  return render_mim(window, ctx, positions);
}

MlmSpan draw_mlm_span(std::size_t train_length, std::size_t window_size, Rng& rng) {
  if (train_length < 2) throw Error("MLM needs a train list of length >= 2");
  MlmSpan span;
  span.start = uniform_index(rng, train_length - 1);
  const std::size_t max_len = std::min(window_size, train_length - span.start);
  span.length = 2 + uniform_index(rng, max_len - 1);
  return span;
}

DataSample gen_mlm(UserIdx user, std::span<const SequenceEntry> train,
                   std::size_t window_size, const RenderContext& ctx, Rng& rng) {
  MlmSpan span = draw_mlm_span(train.size(), window_size, rng);
  DataSample s;
  s.task = Task::kMlm;
  s.split = SplitKind::kTrain;
  s.meta.user = user;
  s.input = prompts::mlm_input(render_items(train.subspan(span.start, span.length), ctx));
  return s;
}

DataSample gen_bpr(const WindowSpec& window, ItemIdx negative,
                   std::span<const ItemIdx> user_items, const RenderContext& ctx,
                   Rng& rng) {
  if (window.items.size() < 2) throw Error("BPR needs a window of length >= 2");
  if (std::binary_search(user_items.begin(), user_items.end(), negative)) {
    throw Error("BPR negative " + std::to_string(negative) +
                " belongs to the sequence of user " + std::to_string(window.user));
  }
  const ItemIdx positive = window.target().item;
  const bool positive_first = uniform_index(rng, 2) == 0;
  const ItemIdx first = positive_first ? positive : negative;
  const ItemIdx second = positive_first ? negative : positive;
  DataSample s = base_sample(Task::kBpr, window);
  auto history = render_items(window.history(), ctx);
  s.input = prompts::bpr_input(history, ctx.item(first), ctx.item(second));
  s.output = prompts::bpr_output(ctx.item(positive));
  s.meta.target = ctx.id(positive);
  s.meta.candidates = {ctx.id(first), ctx.id(second)};
  return s;
}

std::vector<DataSample> gen_ie(ItemIdx item, const ItemMetadata& metadata,
                               const IdMap& ids, std::string_view dataset) {
  std::vector<std::pair<std::string_view, std::string>> fields;
  if (!metadata.title_missing && !metadata.title.empty()) {
    fields.emplace_back("title", metadata.title);
  }
  if (!metadata.categories.empty()) {
    std::string joined;
    for (const auto& c : metadata.categories) {
      if (!joined.empty()) joined += ", ";
      joined += c;
    }
    fields.emplace_back("categories", std::move(joined));
  }
  if (metadata.brand) fields.emplace_back("brand", *metadata.brand);
  if (metadata.price) fields.emplace_back("price", format_price(*metadata.price));
  if (metadata.description) fields.emplace_back("description", *metadata.description);

  std::vector<DataSample> out;
  const std::string& id = ids.display(item);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    auto qa = prompts::ie_pair(fields[f].first, id, fields[f].second);
    DataSample s;
    s.task = Task::kIe;
    s.split = SplitKind::kTrain;
    // Keyed by item rather than user.
    s.id = std::string(dataset) + ".ie." + id + "." + std::string(fields[f].first);
    s.input = std::move(qa.question);
    s.output = std::move(qa.answer);
    s.meta.window = f;
    s.meta.target = id;
    out.push_back(std::move(s));
  }
  return out;
}

SampleGenerator::SampleGenerator(const DatasetSplit& split,
                                 std::span<const ItemMetadata> catalog, const IdMap& ids,
                                 const PopularityTable& popularity, GenConfig config)
    : split_(&split),
      catalog_(catalog),
      ids_(&ids),
      popularity_(&popularity),
      config_(std::move(config)),
      ctx_(ids, catalog) {
  config_.validate();
  user_items_.reserve(split.users.size());
  for (const auto& u : split.users) user_items_.push_back(user_item_set(u));
}

std::vector<UserIdx> SampleGenerator::users(SplitKind split) const {
  if (split == SplitKind::kValid) return split_->valid_users;
  std::vector<UserIdx> all(split_->users.size());
  std::iota(all.begin(), all.end(), 0u);
  return all;
}

Rng SampleGenerator::stream(Task task, const WindowSpec& window, std::size_t epoch) const {
  return Rng(stream_seed(config_.seed, task_name(task), split_name(window.split),
                         window.user, window.index, epoch));
}

std::vector<ItemIdx> SampleGenerator::ranking_candidates(const WindowSpec& window) const {
  Rng rng = stream(Task::kRanking, window, 0);
  auto negatives = sample_negatives_by_popularity(user_items_[window.user], *popularity_,
                                                  config_.pool_size - 1, rng);
  return insert_target(negatives, window.target().item, rng);
}

std::vector<DataSample> SampleGenerator::user_samples(Task task, SplitKind split,
                                                      UserIdx user,
                                                      std::size_t epoch) const {
  std::vector<DataSample> out;
  if (task == Task::kIe) return out;
  if (is_dynamic_task(task) && split != SplitKind::kTrain) return out;
  const auto& us = split_->users.at(user);
  const auto windows = user_windows(user, us, split, config_.window_size);
  const std::size_t sample_epoch = is_dynamic_task(task) ? epoch : 0;
  for (const auto& w : windows) {
    DataSample s;
    switch (task) {
      case Task::kRetrieval:
        s = gen_retrieval(w, ctx_);
        break;
      case Task::kRanking: {
        Rng rng = stream(task, w, 0);
        auto negatives = sample_negatives_by_popularity(user_items_[user], *popularity_,
                                                        config_.pool_size - 1, rng);
        s = gen_ranking(w, negatives, ctx_, rng);
        break;
      }
      case Task::kRating:
        s = gen_rating(w, ctx_);
        break;
      case Task::kMim: {
        Rng rng = stream(task, w, epoch);
        s = gen_mim(w, ctx_, config_.mask_ratio, rng);
        break;
      }
      case Task::kMlm: {
        Rng rng = stream(task, w, epoch);
        s = gen_mlm(user, us.train, config_.window_size, ctx_, rng);
        s.meta.window = w.index;
        break;
      }
      case Task::kBpr: {
        Rng rng = stream(task, w, epoch);
        auto neg = sample_negatives_by_popularity(user_items_[user], *popularity_, 1, rng);
        s = gen_bpr(w, neg.front(), user_items_[user], ctx_, rng);
        break;
      }
      case Task::kIe:
        break;
    }
    s.meta.epoch = sample_epoch;
    s.id = sample_id(config_.dataset, task, split, user, w.index,
                     is_dynamic_task(task) ? std::optional<std::size_t>(epoch)
                                           : std::nullopt);
    out.push_back(std::move(s));
  }
  return out;
}

void SampleGenerator::for_each(Task task, SplitKind split, std::size_t epoch,
                               std::size_t jobs,
                               const std::function<void(const DataSample&)>& sink) const {
  const auto user_list = users(split);
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (user_list.size() + kBlock - 1) / kBlock;
  jobs = std::max<std::size_t>(1, jobs);

  auto run_block = [&](std::size_t b, std::vector<DataSample>& out) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(user_list.size(), lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      auto samples = user_samples(task, split, user_list[i], epoch);
      std::move(samples.begin(), samples.end(), std::back_inserter(out));
    }
  };

  for (std::size_t first = 0; first < n_blocks; first += jobs) {
    const std::size_t count = std::min(jobs, n_blocks - first);
    std::vector<std::vector<DataSample>> results(count);
    if (count == 1) {
      run_block(first, results[0]);
    } else {
      std::vector<std::exception_ptr> errors(count);
      std::vector<std::thread> workers;
      workers.reserve(count);
      for (std::size_t t = 0; t < count; ++t) {
        workers.emplace_back([&, t] {
          try {
            run_block(first + t, results[t]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (const auto& block : results) {
      for (const auto& s : block) sink(s);
    }
  }
}

std::vector<DataSample> SampleGenerator::collect(Task task, SplitKind split,
                                                 std::size_t epoch,
                                                 std::size_t jobs) const {
  std::vector<DataSample> out;
  for_each(task, split, epoch, jobs, [&](const DataSample& s) { out.push_back(s); });
  return out;
}

std::vector<DataSample> SampleGenerator::ie_samples() const {
  std::vector<DataSample> out;
  for (std::size_t i = 0; i < catalog_.size() && i < ids_->size(); ++i) {
    auto samples = gen_ie(static_cast<ItemIdx>(i), catalog_[i], *ids_, config_.dataset);
    std::move(samples.begin(), samples.end(), std::back_inserter(out));
  }
  return out;
}

std::string corpus_file_name(std::string_view dataset, Task task, SplitKind split,
                             std::optional<std::size_t> epoch) {
  std::string name(dataset);
  name += '.';
  name += task_name(task);
  name += '.';
  name += split_name(split);
  if (epoch) name += ".epoch" + std::to_string(*epoch);
  name += ".jsonl";
  return name;
}

std::string truth_file_name(std::string_view dataset, Task task, SplitKind split) {
  std::string name(dataset);
  name += '.';
  name += task_name(task);
  name += '.';
  name += split_name(split);
  name += ".truth.jsonl";
  return name;
}

namespace {

nlohmann::ordered_json truth_line(const DataSample& s) {
  nlohmann::ordered_json j;
  j["sample_id"] = s.id;
  if (s.task == Task::kRating) {
    j["label"] = s.output == "yes" ? 1 : 0;
  } else {
    j["target"] = *s.meta.target;
  }
  return j;
}

}  // namespace

CorpusSummary generate_corpus(const SampleGenerator& generator,
                              const std::filesystem::path& out_dir,
                              const FileHeader& header, std::size_t jobs) {
  const GenConfig& cfg = generator.config();
  CorpusSummary summary;
  if (cfg.tasks.empty()) {
    summary.warnings.push_back("no tasks enabled; no corpus files written");
    return summary;
  }
  const std::size_t missing_before = generator.context().missing_titles();

  auto emit = [&](Task task, SplitKind split, std::optional<std::size_t> epoch) {
    CorpusFile file;
    file.task = task;
    file.split = split;
    file.epoch = epoch;
    file.path = out_dir / corpus_file_name(cfg.dataset, task, split, epoch);
    auto out = open_output(file.path);
    write_jsonl_header(out, header);

    const bool with_truth = is_recommendation_task(task) && split != SplitKind::kTrain;
    CorpusFile truth;
    std::ofstream truth_out;
    if (with_truth) {
      truth = file;
      truth.truth = true;
      truth.path = out_dir / truth_file_name(cfg.dataset, task, split);
      truth_out = open_output(truth.path);
      write_jsonl_header(truth_out, header);
    }
    generator.for_each(task, split, epoch.value_or(0), jobs, [&](const DataSample& s) {
      out << sample_to_json(s).dump() << '\n';
      ++file.n_samples;
      if (with_truth) {
        truth_out << truth_line(s).dump() << '\n';
        ++truth.n_samples;
      }
    });
    out.flush();
    if (!out) throw Error("write failed: " + file.path.string());
    summary.files.push_back(file);
    if (with_truth) {
      truth_out.flush();
      if (!truth_out) throw Error("write failed: " + truth.path.string());
      summary.files.push_back(truth);
    }
  };

  for (Task task : cfg.tasks) {
    if (is_recommendation_task(task)) {
      for (SplitKind split : {SplitKind::kTrain, SplitKind::kValid, SplitKind::kTest}) {
        emit(task, split, std::nullopt);
      }
    } else if (is_dynamic_task(task)) {
      for (std::size_t e = 0; e < cfg.epochs; ++e) emit(task, SplitKind::kTrain, e);
    } else if (task == Task::kIe) {
      CorpusFile file;
      file.task = task;
      file.split = SplitKind::kTrain;
      file.path = out_dir / corpus_file_name(cfg.dataset, task, SplitKind::kTrain,
                                             std::nullopt);
      auto out = open_output(file.path);
      write_jsonl_header(out, header);
      for (const auto& s : generator.ie_samples()) {
        out << sample_to_json(s).dump() << '\n';
        ++file.n_samples;
      }
      out.flush();
      if (!out) throw Error("write failed: " + file.path.string());
      summary.files.push_back(file);
    }
  }
  summary.missing_titles = generator.context().missing_titles() - missing_before;
  if (summary.missing_titles > 0) {
    summary.warnings.push_back(std::to_string(summary.missing_titles) +
                               " item renderings had no title");
  }
  return summary;
}

}  // namespace recprompt
