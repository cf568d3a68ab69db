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

// Top-k ranking metrics (HR@k, NDCG@k) and AUC-ROC over prediction files.
//
// Every test sample has exactly one relevant item, so NDCG reduces to
// 1/log2(rank + 1) with an ideal DCG of 1. A truth sample without a
// prediction record scores 0 and is counted as missing.

#ifndef RECPROMPT_METRICS_H_
#define RECPROMPT_METRICS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recprompt/io.h"
#include "recprompt/sample_gen.h"
#include "recprompt/split.h"

namespace recprompt {

struct PredictionRecord {
  std::string sample_id;
  std::vector<std::string> items;  // best first (retrieval, ranking)
  std::optional<double> score;     // rating
};

struct TruthRecord {
  std::string sample_id;
  std::string target;  // display id (retrieval, ranking)
  int label = -1;      // 0/1 (rating)
};

struct ParsedIds {
  std::vector<std::string> ids;
  std::size_t n_unparseable = 0;
};

// Per line, the first token of the form I<digits> (that exists in `ids`, when
// given) is kept. Lines without one are dropped and counted; repeated ids keep
// their first occurrence.
ParsedIds parse_model_output(std::span<const std::string> lines, const IdMap* ids = nullptr);

// 1-based position of `truth`, if present.
std::optional<std::size_t> rank_of(std::span<const std::string> ranked,
                                   const std::string& truth);

// Means over `truths`; records are matched by sample id and must already be
// normalised. Throws Error on duplicate record ids or k == 0.
double hit_ratio_at_k(std::span<const PredictionRecord> records,
                      std::span<const TruthRecord> truths, std::size_t k);
double ndcg_at_k(std::span<const PredictionRecord> records,
                 std::span<const TruthRecord> truths, std::size_t k);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

// Mann-Whitney estimate with average ranks for ties. nullopt when only one
// class is present.
std::optional<double> auc_roc(std::span<const ScoredLabel> points);

struct MetricsReport {
  Task task = Task::kRetrieval;
  std::vector<std::pair<std::string, double>> values;  // column order of the report
  std::size_t n_truth = 0;
  std::size_t n_evaluated = 0;
  std::size_t n_missing = 0;
  std::size_t n_unparseable = 0;
  std::vector<std::string> warnings;

  std::optional<double> get(std::string_view name) const;
  nlohmann::ordered_json to_json() const;
  // Aligned plain-text table.
  std::string table() const;
};

// Retrieval/ranking: NDCG@5, NDCG@10, HR@1, HR@5, HR@10. Rating: AUC-ROC.
// Item lists pass through parse_model_output first.
MetricsReport evaluate(std::span<const PredictionRecord> records,
                       std::span<const TruthRecord> truths, Task task,
                       const IdMap* ids = nullptr);

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
std::vector<TruthRecord> read_truths(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionRecord> records, const FileHeader& header);

MetricsReport evaluate_run(const std::filesystem::path& predictions,
                           const std::filesystem::path& truths, Task task,
                           const IdMap* ids = nullptr);

}  // namespace recprompt

#endif  // RECPROMPT_METRICS_H_
