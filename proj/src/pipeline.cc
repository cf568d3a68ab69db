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

#include "recprompt/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include "recprompt/io.h"
#include "recprompt/rng.h"

namespace recprompt {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dataset",     "reviews",   "metadata",    "format",     "out",
      "k_core",      "seed",      "window_size", "mask_ratio", "pool_size",
      "epochs",      "tasks",     "valid_users", "k_max",      "dim",
      "learning_rate", "l2",      "bpr_epochs",  "init_scale", "bpr_steps",
      "jobs"};
  return keys;
}

std::string tasks_csv(const std::vector<Task>& tasks) {
  std::string out;
  for (Task t : tasks) {
    if (!out.empty()) out += ',';
    out += task_name(t);
  }
  return out;
}

struct Reference {
  CorpusStats corpus;
  std::size_t train_windows;
};

std::optional<Reference> reference_stats(std::string_view name) {
  if (name == "toys") return Reference{{19412, 11924, 167597, 99.93}, 30761};
  if (name == "beauty") return Reference{{22363, 12101, 198502, 99.93}, 36582};
  if (name == "sports") return Reference{{35598, 18357, 296337, 99.95}, 47320};
  return std::nullopt;
}

std::unique_ptr<Recommender> make_recommender(std::string_view name, const PreparedData& data,
                                              const MarkovTable& markov,
                                              const FactorModel& factors) {
  if (name == "popularity") return std::make_unique<PopularityRecommender>(data.popularity);
  if (name == "history") return std::make_unique<HistoryRecommender>(data.popularity);
  if (name == "markov") return std::make_unique<MarkovRecommender>(markov, data.popularity);
  if (name == "bpr-mf") return std::make_unique<BprMfRecommender>(factors);
  throw Error("unknown model '" + std::string(name) +
              "' (expected popularity, history, markov or bpr-mf)");
}

// Every regenerated pool must equal the one written into the corpus.
void check_ranking_pools(const fs::path& corpus, std::span<const PredictionRecord> records) {
  std::unordered_map<std::string, std::vector<std::string>> pools;
  for_each_jsonl(corpus, [&](const json& j, std::size_t) {
    DataSample s = sample_from_json(j);
    std::sort(s.meta.candidates.begin(), s.meta.candidates.end());
    pools.emplace(s.id, std::move(s.meta.candidates));
  });
  if (pools.size() != records.size()) {
    throw Error("ranking corpus " + corpus.string() + " holds " + std::to_string(pools.size()) +
                " samples but " + std::to_string(records.size()) +
                " were regenerated; corpus and config disagree");
  }
  for (const auto& r : records) {
    auto it = pools.find(r.sample_id);
    std::vector<std::string> mine = r.items;
    std::sort(mine.begin(), mine.end());
    if (it == pools.end() || it->second != mine) {
      throw Error("ranking pool for " + r.sample_id + " differs from " + corpus.string() +
                  "; the corpus was generated with a different seed or config");
    }
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw Error("unknown config key '" + key + "'");
  }
  RunConfig c;
  try {
    if (j.contains("dataset")) c.dataset = j["dataset"].get<std::string>();
    if (j.contains("reviews")) c.reviews = j["reviews"].get<std::string>();
    if (j.contains("metadata")) c.metadata = j["metadata"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("k_core")) c.k_core = j["k_core"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("window_size")) c.window_size = j["window_size"].get<std::size_t>();
    if (j.contains("mask_ratio")) c.mask_ratio = j["mask_ratio"].get<double>();
    if (j.contains("pool_size")) c.pool_size = j["pool_size"].get<std::size_t>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("tasks")) {
      const auto& t = j["tasks"];
      if (t.is_string()) {
        c.tasks = parse_task_list(t.get<std::string>());
      } else {
        c.tasks.clear();
        for (const auto& name : t) {
          auto task = parse_task(name.get<std::string>());
          if (!task) throw Error("unknown task '" + name.get<std::string>() + "'");
          c.tasks.push_back(*task);
        }
      }
    }
    if (j.contains("valid_users")) c.valid_users = j["valid_users"].get<std::size_t>();
    if (j.contains("k_max")) c.k_max = j["k_max"].get<std::size_t>();
    if (j.contains("dim")) c.bpr.dim = j["dim"].get<std::size_t>();
    if (j.contains("learning_rate")) c.bpr.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("l2")) c.bpr.l2 = j["l2"].get<double>();
    if (j.contains("bpr_epochs")) c.bpr.epochs = j["bpr_epochs"].get<std::size_t>();
    if (j.contains("init_scale")) c.bpr.init_scale = j["init_scale"].get<double>();
    if (j.contains("bpr_steps")) c.bpr.steps = j["bpr_steps"].get<std::size_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(std::string("bad config value: ") + e.what());
  }
  return c;
}

ojson RunConfig::to_json() const {
  ojson j;
  j["dataset"] = dataset;
  j["reviews"] = reviews.string();
  j["metadata"] = metadata.string();
  j["format"] = format;
  j["out"] = out.string();
  j["k_core"] = k_core;
  j["seed"] = seed;
  j["window_size"] = window_size;
  j["mask_ratio"] = mask_ratio;
  j["pool_size"] = pool_size;
  j["epochs"] = epochs;
  j["tasks"] = tasks_csv(tasks);
  j["valid_users"] = valid_users;
  j["k_max"] = k_max;
  j["dim"] = bpr.dim;
  j["learning_rate"] = bpr.learning_rate;
  j["l2"] = bpr.l2;
  j["bpr_epochs"] = bpr.epochs;
  j["init_scale"] = bpr.init_scale;
  if (bpr.steps) j["bpr_steps"] = *bpr.steps;
  j["jobs"] = jobs;
  return j;
}

std::string RunConfig::digest() const {
  ojson j = to_json();
  for (const char* key : {"reviews", "metadata", "out", "jobs"}) j.erase(key);
  return hex64(fnv1a64(j.dump()));
}

FileHeader RunConfig::header() const { return FileHeader::make(seed, digest()); }

GenConfig RunConfig::gen_config() const {
  GenConfig g;
  g.dataset = dataset;
  g.window_size = window_size;
  g.mask_ratio = mask_ratio;
  g.pool_size = pool_size;
  g.seed = seed;
  g.epochs = epochs;
  g.tasks = tasks;
  return g;
}

void RunConfig::validate() const {
  gen_config().validate();
  if (k_core < 1) throw Error("k_core must be >= 1");
  if (k_max == 0) throw Error("k_max must be >= 1");
  if (jobs == 0) throw Error("jobs must be >= 1");
  if (dataset.empty() || dataset.find_first_of("/.") != std::string::npos) {
    throw Error("dataset name must be non-empty and contain no '/' or '.'");
  }
  if (!parse_input_format(format)) throw Error("unknown input format '" + format + "'");
}

fs::path RunConfig::prediction_path(std::string_view model, Task task, SplitKind split) const {
  return out / "predictions" /
         (std::string(model) + "." + std::string(task_name(task)) + "." +
          std::string(split_name(split)) + ".jsonl");
}

fs::path RunConfig::report_path(std::string_view model, SplitKind split,
                                std::string_view ext) const {
  return out / "reports" /
         (std::string(model) + "." + std::string(split_name(split)) + "." + std::string(ext));
}

RunConfig load_run_config(const fs::path& path) {
  require_artifact(path, "--config");
  std::ifstream in(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(path.string() + ": config is not valid JSON");
  return RunConfig::from_json(j);
}

std::uint64_t idmap_seed(std::uint64_t seed) { return derive_seed(seed, "idmap"); }
std::uint64_t validation_seed(std::uint64_t seed) { return derive_seed(seed, "valid-users"); }
std::uint64_t model_seed(std::uint64_t seed) { return derive_seed(seed, "bpr-mf"); }

Snapshot ingest_streams(std::istream& reviews, std::istream* metadata, InputFormat format,
                        int k, std::string dataset) {
  Snapshot snap;
  snap.dataset = std::move(dataset);
  ParseResult parsed = parse_interactions(reviews, format);
  snap.report.n_records = parsed.n_records;
  snap.report.n_skipped = parsed.n_skipped;
  auto unique = dedupe(parsed.interactions);
  snap.report.n_after_dedupe = unique.size();
  auto core = k_core_filter(unique, k);
  snap.report.n_after_kcore = core.size();
  snap.report.k = k;
  snap.table = build_sequences(core);
  std::vector<ItemMetadata> meta;
  if (metadata) {
    MetadataResult m = parse_metadata(*metadata);
    meta = std::move(m.items);
  }
  snap.report.n_metadata = meta.size();
  snap.catalog = align_catalog(snap.table.item_ids, meta);
  snap.report.n_missing_title = static_cast<std::size_t>(
      std::count_if(snap.catalog.begin(), snap.catalog.end(),
                    [](const ItemMetadata& m) { return m.title_missing; }));
  return snap;
}

PreparedData prepare(const Snapshot& snapshot, const RunConfig& config) {
  PreparedData d;
  d.snapshot = snapshot;
  const std::size_t n_items = snapshot.table.item_ids.size();
  d.ids = build_id_map(n_items, idmap_seed(config.seed));
  d.split = apply_leave_one_out(snapshot.table.sequences);
  d.split.valid_users = select_validation_users(snapshot.table.sequences.size(),
                                                validation_seed(config.seed),
                                                config.valid_users);
  d.popularity = PopularityTable::from_split(d.split, n_items);
  return d;
}

PreparedData load_prepared(const RunConfig& config) {
  require_artifact(config.snapshot_path(), "ingest");
  require_artifact(config.idmap_path(), "split");
  require_artifact(config.split_path(), "split");
  std::optional<FileHeader> header;
  Snapshot snap = load_snapshot(config.snapshot_path(), &header);
  check_seed(header, config.seed, config.snapshot_path());
  PreparedData d = prepare(snap, config);

  LoadedIdMap loaded = load_id_map(config.idmap_path());
  check_seed(loaded.header, config.seed, config.idmap_path());
  if (loaded.ids.forward() != d.ids.forward()) {
    throw Error(config.idmap_path().string() + " does not match the snapshot; rerun split");
  }
  json split = read_json_document(config.split_path());
  if (!split.contains("header")) throw Error(config.split_path().string() + ": no header");
  check_seed(FileHeader::from_json(split["header"]), config.seed, config.split_path());
  if (split.at("valid_users").get<std::vector<UserIdx>>() != d.split.valid_users) {
    throw Error(config.split_path().string() +
                " lists different validation users; rerun split with this config");
  }
  return d;
}

IngestReport cmd_ingest(const RunConfig& config) {
  config.validate();
  if (config.reviews.empty()) throw Error("ingest needs --reviews");
  if (!fs::exists(config.reviews)) throw Error("no such reviews file: " + config.reviews.string());
  std::ifstream reviews(config.reviews, std::ios::binary);
  if (!reviews) throw Error("cannot read " + config.reviews.string());
  std::ifstream meta;
  if (!config.metadata.empty()) {
    if (!fs::exists(config.metadata)) {
      throw Error("no such metadata file: " + config.metadata.string());
    }
    meta.open(config.metadata, std::ios::binary);
    if (!meta) throw Error("cannot read " + config.metadata.string());
  }
  Snapshot snap = ingest_streams(reviews, config.metadata.empty() ? nullptr : &meta,
                                 *parse_input_format(config.format), config.k_core,
                                 config.dataset);
  save_snapshot(config.snapshot_path(), snap, config.header());
  return snap.report;
}

void cmd_split(const RunConfig& config) {
  config.validate();
  require_artifact(config.snapshot_path(), "ingest");
  std::optional<FileHeader> header;
  Snapshot snap = load_snapshot(config.snapshot_path(), &header);
  check_seed(header, config.seed, config.snapshot_path());
  PreparedData d = prepare(snap, config);
  save_id_map(config.idmap_path(), d.ids, snap.table.item_ids, config.header());
  ojson doc;
  doc["header"] = config.header().to_json();
  doc["dataset"] = config.dataset;
  doc["idmap_seed"] = idmap_seed(config.seed);
  doc["n_users"] = d.split.users.size();
  doc["n_items"] = d.ids.size();
  doc["n_train_interactions"] = total_train_interactions(d.split);
  doc["valid_users"] = d.split.valid_users;
  write_json_document(config.split_path(), doc);
}

CorpusSummary cmd_gen(const RunConfig& config) {
  config.validate();
  PreparedData d = load_prepared(config);
  SampleGenerator gen(d.split, d.snapshot.catalog, d.ids, d.popularity, config.gen_config());
  CorpusSummary summary = generate_corpus(gen, config.corpus_dir(), config.header(), config.jobs);
  ojson manifest;
  manifest["header"] = config.header().to_json();
  manifest["config"] = config.to_json();
  manifest["config"].erase("reviews");
  manifest["config"].erase("metadata");
  manifest["config"].erase("out");
  manifest["config"].erase("jobs");
  ojson files = ojson::array();
  for (const auto& f : summary.files) {
    ojson e;
    e["file"] = f.path.filename().string();
    e["task"] = task_name(f.task);
    e["split"] = split_name(f.split);
    if (f.epoch) e["epoch"] = *f.epoch;
    e["truth"] = f.truth;
    e["n_samples"] = f.n_samples;
    files.push_back(std::move(e));
  }
  manifest["files"] = std::move(files);
  manifest["missing_titles"] = summary.missing_titles;
  manifest["warnings"] = summary.warnings;
  write_json_document(config.corpus_dir() / "manifest.json", manifest);
  return summary;
}

TrainReport cmd_train(const RunConfig& config) {
  config.validate();
  PreparedData d = load_prepared(config);
  TrainReport report;
  FactorModel model =
      train_bpr_mf(d.split, d.popularity, config.bpr, model_seed(config.seed), &report);
  model.save(config.model_path(), config.header());
  return report;
}

std::vector<fs::path> cmd_predict(const RunConfig& config, std::string_view model,
                                  SplitKind split) {
  config.validate();
  if (split == SplitKind::kTrain) throw Error("predict runs on the valid or test split");
  PreparedData d = load_prepared(config);
  SampleGenerator gen(d.split, d.snapshot.catalog, d.ids, d.popularity, config.gen_config());
  MarkovTable markov;
  FactorModel factors;
  if (model == "markov") markov = MarkovTable::from_split(d.split, d.ids.size());
  if (model == "bpr-mf") {
    require_artifact(config.model_path(), "train");
    json doc = read_json_document(config.model_path());
    check_seed(FileHeader::from_json(doc.at("header")), config.seed, config.model_path());
    factors = FactorModel::load(config.model_path());
    if (factors.n_users() != d.split.users.size() || factors.n_items() != d.ids.size()) {
      throw Error(config.model_path().string() + " was trained on a different snapshot");
    }
  }
  auto rec = make_recommender(model, d, markov, factors);

  std::vector<fs::path> written;
  for (Task task : {Task::kRetrieval, Task::kRanking, Task::kRating}) {
    if (!config.gen_config().enabled(task)) continue;
    const fs::path truth =
        config.corpus_dir() / truth_file_name(config.dataset, task, split);
    require_artifact(truth, "gen");
    check_seed(read_jsonl_header(truth), config.seed, truth);
    auto records = emit_predictions(*rec, gen, d.split, task, split, config.k_max, config.jobs);
    if (task == Task::kRanking) {
      const fs::path corpus =
          config.corpus_dir() / corpus_file_name(config.dataset, task, split, std::nullopt);
      require_artifact(corpus, "gen");
      check_seed(read_jsonl_header(corpus), config.seed, corpus);
      check_ranking_pools(corpus, records);
    }
    const fs::path path = config.prediction_path(model, task, split);
    write_predictions(path, records, config.header());
    written.push_back(path);
  }
  return written;
}

std::vector<MetricsReport> cmd_eval(const RunConfig& config, std::string_view model,
                                    SplitKind split) {
  config.validate();
  require_artifact(config.idmap_path(), "split");
  LoadedIdMap ids = load_id_map(config.idmap_path());
  check_seed(ids.header, config.seed, config.idmap_path());
  std::vector<MetricsReport> reports;
  for (Task task : {Task::kRetrieval, Task::kRanking, Task::kRating}) {
    if (!config.gen_config().enabled(task)) continue;
    const fs::path preds = config.prediction_path(model, task, split);
    const fs::path truth = config.corpus_dir() / truth_file_name(config.dataset, task, split);
    require_artifact(preds, "predict");
    require_artifact(truth, "gen");
    check_seed(read_jsonl_header(preds), config.seed, preds);
    check_seed(read_jsonl_header(truth), config.seed, truth);
    reports.push_back(evaluate_run(preds, truth, task, &ids.ids));
  }
  ojson doc;
  doc["header"] = config.header().to_json();
  doc["model"] = model;
  doc["split"] = split_name(split);
  ojson list = ojson::array();
  std::string text;
  for (const auto& r : reports) {
    list.push_back(r.to_json());
    text += r.table();
  }
  doc["reports"] = std::move(list);
  write_json_document(config.report_path(model, split, "json"), doc);
  auto out = open_output(config.report_path(model, split, "txt"));
  out << config.header().to_comment() << '\n' << text;
  return reports;
}

StatsReport compute_stats_report(const PreparedData& data, const RunConfig& config,
                                 std::optional<std::string> reference) {
  StatsReport r;
  r.dataset = config.dataset;
  r.corpus = compute_stats(data.snapshot.table.sequences);
  std::size_t train_windows = 0;
  for (const auto& u : data.split.users) {
    train_windows += train_window_count(u.train.size(), config.window_size);
  }
  for (Task task : config.tasks) {
    if (task == Task::kIe) continue;
    TaskCount c;
    c.task = task;
    c.dynamic = is_dynamic_task(task);
    if (!c.dynamic) {
      c.train = train_windows;
      c.valid = data.split.valid_users.size();
      c.test = data.split.users.size();
    }
    r.tasks.push_back(c);
  }
  if (!reference) return r;
  r.reference = *reference;
  auto ref = reference_stats(*reference);
  if (!ref) throw Error("no reference statistics for '" + *reference +
                        "' (expected toys, beauty or sports)");
  auto diff = [&](std::string_view what, double got, double want) {
    if (got == want) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: got %.2f, reference %.2f (delta %+.2f)",
                  std::string(what).c_str(), got, want, got - want);
    r.mismatches.emplace_back(buf);
  };
  diff("users", static_cast<double>(r.corpus.n_users), static_cast<double>(ref->corpus.n_users));
  diff("items", static_cast<double>(r.corpus.n_items), static_cast<double>(ref->corpus.n_items));
  diff("interactions", static_cast<double>(r.corpus.n_interactions),
       static_cast<double>(ref->corpus.n_interactions));
  diff("sparsity", std::round(r.corpus.sparsity * 100.0) / 100.0, ref->corpus.sparsity);
  diff("train windows", static_cast<double>(train_windows),
       static_cast<double>(ref->train_windows));
  if (!r.mismatches.empty()) {
    const IngestReport& ir = data.snapshot.report;
    r.mismatches.push_back(
        "preprocessing: " + std::to_string(ir.n_records) + " records, " +
        std::to_string(ir.n_skipped) + " malformed, " + std::to_string(ir.n_after_dedupe) +
        " after dedupe, " + std::to_string(ir.n_after_kcore) + " after " +
        std::to_string(ir.k) + "-core, window size " + std::to_string(config.window_size));
  }
  return r;
}

StatsReport cmd_stats(const RunConfig& config, std::optional<std::string> reference) {
  config.validate();
  require_artifact(config.snapshot_path(), "ingest");
  std::optional<FileHeader> header;
  Snapshot snap = load_snapshot(config.snapshot_path(), &header);
  check_seed(header, config.seed, config.snapshot_path());
  if (!reference && reference_stats(config.dataset)) reference = config.dataset;
  return compute_stats_report(prepare(snap, config), config, reference);
}

void print_stats(const StatsReport& r, std::ostream& out) {
  char buf[256];
  out << "dataset " << r.dataset << '\n';
  std::snprintf(buf, sizeof(buf), "%-10s %-10s %-14s %-10s\n", "#Users", "#Items",
                "#Interactions", "Sparsity(%)");
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-10zu %-10zu %-14zu %-10.2f\n", r.corpus.n_users,
                r.corpus.n_items, r.corpus.n_interactions, r.corpus.sparsity);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-10s %10s %10s %10s\n", "task", "#Train", "#Valid",
                "#Test");
  out << buf;
  for (const auto& t : r.tasks) {
    if (t.dynamic) {
      std::snprintf(buf, sizeof(buf), "%-10s %10s %10d %10d\n",
                    std::string(task_name(t.task)).c_str(), "DS", 0, 0);
    } else {
      std::snprintf(buf, sizeof(buf), "%-10s %10zu %10zu %10zu\n",
                    std::string(task_name(t.task)).c_str(), t.train, t.valid, t.test);
    }
    out << buf;
  }
  if (r.reference) {
    if (r.mismatches.empty()) {
      out << "matches reference statistics for " << *r.reference << '\n';
    } else {
      out << "MISMATCH against reference statistics for " << *r.reference << ":\n";
      for (const auto& m : r.mismatches) out << "  " << m << '\n';
    }
  }
}

}  // namespace recprompt
