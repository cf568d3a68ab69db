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

// Pipeline stages behind the command-line tool. Each stage reads its inputs
// from, and writes its outputs to, a single output directory:
//
//   snapshot.json          ingest
//   idmap.tsv, split.json  split
//   corpus/                gen
//   models/bpr-mf.json     train
//   predictions/           predict
//   reports/               eval

#ifndef RECPROMPT_PIPELINE_H_
#define RECPROMPT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recprompt/ingest.h"
#include "recprompt/metrics.h"
#include "recprompt/models.h"
#include "recprompt/sample_gen.h"
#include "recprompt/split.h"

namespace recprompt {

struct RunConfig {
  std::string dataset = "dataset";
  std::filesystem::path reviews;
  std::filesystem::path metadata;
  std::string format = "amazon-review-jsonl";
  std::filesystem::path out = "out";
  int k_core = 5;
  std::uint64_t seed = 42;
  std::size_t window_size = 20;
  double mask_ratio = 0.20;
  std::size_t pool_size = 100;
  std::size_t epochs = 1;
  std::vector<Task> tasks = default_tasks();
  std::size_t valid_users = kDefaultValidationUsers;
  std::size_t k_max = 20;
  BprHyperparams bpr;
  std::size_t jobs = 1;

  // Unknown keys are rejected. Keys match the long flag names with '-'
  // replaced by '_'.
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  // Hash over everything except paths and the worker count.
  std::string digest() const;
  FileHeader header() const;
  GenConfig gen_config() const;
  void validate() const;

  std::filesystem::path snapshot_path() const { return out / "snapshot.json"; }
  std::filesystem::path idmap_path() const { return out / "idmap.tsv"; }
  std::filesystem::path split_path() const { return out / "split.json"; }
  std::filesystem::path corpus_dir() const { return out / "corpus"; }
  std::filesystem::path model_path() const { return out / "models" / "bpr-mf.json"; }
  std::filesystem::path prediction_path(std::string_view model, Task task,
                                        SplitKind split) const;
  std::filesystem::path report_path(std::string_view model, SplitKind split,
                                    std::string_view ext) const;
};

RunConfig load_run_config(const std::filesystem::path& path);

std::uint64_t idmap_seed(std::uint64_t seed);
std::uint64_t validation_seed(std::uint64_t seed);
std::uint64_t model_seed(std::uint64_t seed);

// Parse, dedupe, k-core and sequence a raw dataset.
Snapshot ingest_streams(std::istream& reviews, std::istream* metadata, InputFormat format,
                        int k, std::string dataset);

// Everything downstream of the snapshot, rebuilt deterministically.
struct PreparedData {
  Snapshot snapshot;
  IdMap ids;
  DatasetSplit split;
  PopularityTable popularity;
};

PreparedData prepare(const Snapshot& snapshot, const RunConfig& config);
// Loads the snapshot and checks the split artifacts written by cmd_split.
PreparedData load_prepared(const RunConfig& config);

IngestReport cmd_ingest(const RunConfig& config);
void cmd_split(const RunConfig& config);
CorpusSummary cmd_gen(const RunConfig& config);
TrainReport cmd_train(const RunConfig& config);
// Models: popularity, history, markov, bpr-mf.
std::vector<std::filesystem::path> cmd_predict(const RunConfig& config, std::string_view model,
                                               SplitKind split = SplitKind::kTest);
std::vector<MetricsReport> cmd_eval(const RunConfig& config, std::string_view model,
                                    SplitKind split = SplitKind::kTest);

struct TaskCount {
  Task task = Task::kRetrieval;
  std::size_t train = 0;  // 0 for dynamically sampled tasks
  std::size_t valid = 0;
  std::size_t test = 0;
  bool dynamic = false;
};

struct StatsReport {
  std::string dataset;
  CorpusStats corpus;
  std::vector<TaskCount> tasks;
  std::vector<std::string> mismatches;  // against the reference, if one exists
  std::optional<std::string> reference;
};

// Reference statistics exist for "toys", "beauty" and "sports".
StatsReport compute_stats_report(const PreparedData& data, const RunConfig& config,
                                 std::optional<std::string> reference);
StatsReport cmd_stats(const RunConfig& config, std::optional<std::string> reference);
void print_stats(const StatsReport& report, std::ostream& out);

}  // namespace recprompt

#endif  // RECPROMPT_PIPELINE_H_
