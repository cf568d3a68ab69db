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

#include "recprompt/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace recprompt {

using json = nlohmann::json;

namespace {

// First "I<digits>" token not glued to surrounding alphanumerics.
std::optional<std::string> first_id_token(std::string_view line, const IdMap* ids) {
  auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != 'I') continue;
    if (i > 0 && is_alnum(line[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j == i + 1) continue;
    if (j < line.size() && std::isalpha(static_cast<unsigned char>(line[j]))) continue;
    std::string token(line.substr(i, j - i));
    if (ids && !ids->find(token)) continue;
    return token;
  }
  return std::nullopt;
}

using RecordIndex = std::unordered_map<std::string_view, const PredictionRecord*>;

RecordIndex index_records(std::span<const PredictionRecord> records) {
  RecordIndex index;
  index.reserve(records.size());
  for (const auto& r : records) {
    if (!index.emplace(r.sample_id, &r).second) {
      throw Error("duplicate sample_id in predictions: " + r.sample_id);
    }
  }
  return index;
}

template <typename Gain>
double mean_gain(std::span<const PredictionRecord> records,
                 std::span<const TruthRecord> truths, std::size_t k, Gain gain) {
  if (k == 0) throw Error("k must be >= 1");
  auto index = index_records(records);
  if (truths.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : truths) {
    auto it = index.find(t.sample_id);
    if (it == index.end()) continue;
    auto rank = rank_of(it->second->items, t.target);
    if (rank && *rank <= k) total += gain(*rank);
  }
  return total / static_cast<double>(truths.size());
}

}  // namespace

ParsedIds parse_model_output(std::span<const std::string> lines, const IdMap* ids) {
  ParsedIds out;
  std::unordered_set<std::string> seen;
  for (const auto& line : lines) {
    auto token = first_id_token(line, ids);
    if (!token) {
      ++out.n_unparseable;
      continue;
    }
    if (seen.insert(*token).second) out.ids.push_back(std::move(*token));
  }
  return out;
}

std::optional<std::size_t> rank_of(std::span<const std::string> ranked,
                                   const std::string& truth) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i] == truth) return i + 1;
  }
  return std::nullopt;
}

double hit_ratio_at_k(std::span<const PredictionRecord> records,
                      std::span<const TruthRecord> truths, std::size_t k) {
  return mean_gain(records, truths, k, [](std::size_t) { return 1.0; });
}

double ndcg_at_k(std::span<const PredictionRecord> records,
                 std::span<const TruthRecord> truths, std::size_t k) {
  return mean_gain(records, truths, k, [](std::size_t rank) {
    return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  });
}

std::optional<double> auc_roc(std::span<const ScoredLabel> points) {
  std::size_t n_pos = 0;
  for (const auto& p : points) n_pos += p.label == 1 ? 1 : 0;
  const std::size_t n_neg = points.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].score < points[b].score;
  });
  // Sum of (1-based) ranks of positives, ties sharing their average rank.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < order.size() && points[order[j]].score == points[order[i]].score) {
      pos_in_group += points[order[j]].label == 1 ? 1 : 0;
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += avg_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::optional<double> MetricsReport::get(std::string_view name) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  return std::nullopt;
}

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task_name(task);
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [k, v] : values) metrics[k] = v;
  j["metrics"] = std::move(metrics);
  j["n_truth"] = n_truth;
  j["n_evaluated"] = n_evaluated;
  j["n_missing"] = n_missing;
  j["n_unparseable"] = n_unparseable;
  j["warnings"] = warnings;
  return j;
}

std::string MetricsReport::table() const {
  std::ostringstream os;
  std::vector<std::string> heads, cells;
  for (const auto& [k, v] : values) {
    heads.push_back(k);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    cells.emplace_back(buf);
  }
  heads.emplace_back("n_eval");
  cells.push_back(std::to_string(n_evaluated));
  heads.emplace_back("n_unparseable");
  cells.push_back(std::to_string(n_unparseable));
  auto row = [&](const std::vector<std::string>& cols) {
    os << std::string(task_name(task)).append(10 - std::min<std::size_t>(10, task_name(task).size()), ' ');
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::size_t width = std::max(heads[c].size(), cells[c].size()) + 2;
      os << std::string(width - cols[c].size(), ' ') << cols[c];
    }
    os << '\n';
  };
  row(heads);
  row(cells);
  return os.str();
}

MetricsReport evaluate(std::span<const PredictionRecord> records,
                       std::span<const TruthRecord> truths, Task task, const IdMap* ids) {
  if (!is_recommendation_task(task)) {
    throw Error("cannot evaluate task '" + std::string(task_name(task)) + "'");
  }
  MetricsReport report;
  report.task = task;
  report.n_truth = truths.size();
  if (records.empty()) report.warnings.push_back("prediction set is empty");

  const bool rating = task == Task::kRating;
  std::vector<PredictionRecord> normalized;
  normalized.reserve(records.size());
  for (const auto& r : records) {
    if (rating && !r.score) {
      throw Error("record " + r.sample_id + " lacks a score; not a rating prediction file");
    }
    if (!rating && r.score && r.items.empty()) {
      throw Error("record " + r.sample_id + " carries a score; not a " +
                  std::string(task_name(task)) + " prediction file");
    }
    if (rating && !std::isfinite(*r.score)) {
      throw Error("record " + r.sample_id + " has a non-finite score");
    }
    PredictionRecord n;
    n.sample_id = r.sample_id;
    n.score = r.score;
    if (!rating) {
      auto parsed = parse_model_output(r.items, ids);
      report.n_unparseable += parsed.n_unparseable;
      n.items = std::move(parsed.ids);
    }
    normalized.push_back(std::move(n));
  }
  auto index = index_records(normalized);
  for (const auto& t : truths) {
    if (rating && t.label != 0 && t.label != 1) {
      throw Error("truth " + t.sample_id + " has no 0/1 label; not a rating truth file");
    }
    if (!rating && t.target.empty()) {
      throw Error("truth " + t.sample_id + " has no target; not a " +
                  std::string(task_name(task)) + " truth file");
    }
    if (index.count(t.sample_id)) {
      ++report.n_evaluated;
    } else {
      ++report.n_missing;
    }
  }
  if (report.n_missing > 0) {
    report.warnings.push_back(std::to_string(report.n_missing) +
                              " truth samples had no prediction and scored 0");
  }

  if (rating) {
    std::vector<ScoredLabel> points;
    points.reserve(truths.size());
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& t : truths) {
      auto it = index.find(t.sample_id);
      // Missing predictions get the worst possible score for their label.
      double s = it != index.end() ? *it->second->score : (t.label == 1 ? -inf : inf);
      points.push_back({s, t.label});
    }
    auto auc = auc_roc(points);
    if (auc) {
      report.values.emplace_back("AUC-ROC", *auc);
    } else {
      report.warnings.push_back("AUC-ROC undefined: truth labels contain a single class");
    }
    return report;
  }
  report.values.emplace_back("NDCG@5", ndcg_at_k(normalized, truths, 5));
  report.values.emplace_back("NDCG@10", ndcg_at_k(normalized, truths, 10));
  report.values.emplace_back("HR@1", hit_ratio_at_k(normalized, truths, 1));
  report.values.emplace_back("HR@5", hit_ratio_at_k(normalized, truths, 5));
  report.values.emplace_back("HR@10", hit_ratio_at_k(normalized, truths, 10));
  return report;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      PredictionRecord r;
      r.sample_id = j.at("sample_id").get<std::string>();
      if (j.contains("items")) {
        for (const auto& item : j["items"]) r.items.push_back(item.get<std::string>());
      }
      if (j.contains("score")) r.score = j["score"].get<double>();
      if (!j.contains("items") && !j.contains("score")) {
        throw Error("record has neither items nor score");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

std::vector<TruthRecord> read_truths(const std::filesystem::path& path) {
  std::vector<TruthRecord> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      TruthRecord t;
      t.sample_id = j.at("sample_id").get<std::string>();
      if (j.contains("target")) t.target = j["target"].get<std::string>();
      if (j.contains("label")) t.label = j["label"].get<int>();
      out.push_back(std::move(t));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionRecord> records, const FileHeader& header) {
  auto out = open_output(path);
  write_jsonl_header(out, header);
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["sample_id"] = r.sample_id;
    if (r.score) {
      j["score"] = *r.score;
    } else {
      j["items"] = r.items;
    }
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

MetricsReport evaluate_run(const std::filesystem::path& predictions,
                           const std::filesystem::path& truths, Task task, const IdMap* ids) {
  auto records = read_predictions(predictions);
  auto truth = read_truths(truths);
  return evaluate(records, truth, task, ids);
}

}  // namespace recprompt
