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

// The files a downstream fine-tuning consumer reads and writes: corpus JSONL,
// the IdMap TSV, truth files and prediction JSONL. The consumer below only
// touches those files, never the snapshot or split.

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pipeline_fixture.h"
#include "test_util.h"

namespace recprompt {
namespace {

using nlohmann::json;

// Records of a JSONL file; the leading {"header": ...} line goes to `header`.
std::vector<json> read_lines(const std::filesystem::path& path, json* header = nullptr) {
  std::ifstream in(path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.size() == 1 && j.contains("header")) {
      if (header) *header = j["header"];
      continue;
    }
    out.push_back(std::move(j));
  }
  return out;
}

class AdapterContract : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    SyntheticConfig s;
    s.n_users = 120;
    s.n_items = 100;
    s.max_length = 15;
    s.seed = 21;
    config_ = new RunConfig(testing::synthetic_run(dir_->path(), s, "toy"));
    config_->window_size = 8;
    config_->pool_size = 10;
    config_->epochs = 2;
    cmd_ingest(*config_);
    cmd_split(*config_);
    cmd_gen(*config_);
  }
  static void TearDownTestSuite() {
    delete config_;
    delete dir_;
  }

  static testing::TempDir* dir_;
  static RunConfig* config_;
};

testing::TempDir* AdapterContract::dir_ = nullptr;
RunConfig* AdapterContract::config_ = nullptr;

TEST_F(AdapterContract, CorpusLines) {
  std::set<std::string> ids;
  for (const auto& e : std::filesystem::directory_iterator(config_->corpus_dir())) {
    const std::string name = e.path().filename().string();
    if (name == "manifest.json" || name.find(".truth.") != std::string::npos) continue;
    json header;
    auto lines = read_lines(e.path(), &header);
    EXPECT_EQ(header["tool"], "recprompt") << name;
    EXPECT_EQ(header["seed"], config_->seed) << name;
    ASSERT_FALSE(lines.empty()) << name;
    for (const auto& j : lines) {
      std::vector<std::string> keys;
      for (const auto& [k, v] : j.items()) keys.push_back(k);
      ASSERT_EQ(keys, (std::vector<std::string>{"id", "input", "meta", "output", "task"}));
      ASSERT_TRUE(j["input"].is_string());
      ASSERT_TRUE(j["output"].is_string());
      ASSERT_TRUE(j["meta"].contains("candidates"));
      EXPECT_TRUE(ids.insert(j["id"].get<std::string>()).second) << j["id"];
      if (j["task"] == "mlm") EXPECT_EQ(j["output"], "");
      if (j["task"] == "bpr") EXPECT_EQ(j["meta"]["candidates"].size(), 2u);
    }
  }
  EXPECT_FALSE(ids.empty());
}

TEST_F(AdapterContract, ManifestListsEveryFile) {
  std::ifstream in(config_->corpus_dir() / "manifest.json");
  json m = json::parse(in);
  std::size_t listed = 0;
  for (const auto& f : m["files"]) {
    ++listed;
    const auto path = config_->corpus_dir() / f["file"].get<std::string>();
    EXPECT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(read_lines(path).size(), f["n_samples"].get<std::size_t>()) << path;
  }
  std::size_t on_disk = 0;
  for (const auto& e : std::filesystem::directory_iterator(config_->corpus_dir())) {
    on_disk += e.path().filename() != "manifest.json" ? 1 : 0;
  }
  EXPECT_EQ(listed, on_disk);
}

TEST_F(AdapterContract, IdMapTsv) {
  std::ifstream in(config_->idmap_path());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# tool=recprompt ", 0), 0u);
  std::set<std::string> raw, display;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    ASSERT_EQ(line.find('\t', tab + 1), std::string::npos);
    raw.insert(line.substr(0, tab));
    display.insert(line.substr(tab + 1));
  }
  EXPECT_EQ(raw.size(), display.size());
  for (std::size_t v = 0; v < display.size(); ++v) {
    EXPECT_TRUE(display.count("I" + std::to_string(v)));
  }
}

TEST_F(AdapterContract, TruthMatchesCorpus) {
  for (const char* task : {"retrieval", "ranking", "rating"}) {
    for (const char* split : {"valid", "test"}) {
      const std::string stem = std::string("toy.") + task + "." + split;
      auto samples = read_lines(config_->corpus_dir() / (stem + ".jsonl"));
      auto truths = read_lines(config_->corpus_dir() / (stem + ".truth.jsonl"));
      ASSERT_EQ(samples.size(), truths.size()) << stem;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(samples[i]["id"], truths[i]["sample_id"]);
        if (std::string(task) == "rating") {
          EXPECT_EQ(truths[i]["label"].get<int>(), samples[i]["output"] == "yes" ? 1 : 0);
        } else {
          EXPECT_EQ(truths[i]["target"], samples[i]["output"]);
        }
      }
    }
  }
}

// A stand-in consumer: answers from corpus text only, writes predictions in
// the shared format and hands them to the evaluator.
TEST_F(AdapterContract, ExternalPredictionsEvaluate) {
  const auto corpus = config_->corpus_dir();
  auto ranking = read_lines(corpus / "toy.ranking.test.jsonl");
  testing::TempDir out;
  {
    std::ofstream p(out / "ranking.jsonl");
    for (const auto& s : ranking) {
      // Generated text lines, one id per beam, parsed like model output.
      std::vector<std::string> beams;
      beams.push_back("Item ID: " + s["output"].get<std::string>() + ", Title: whatever");
      for (const auto& c : s["meta"]["candidates"]) {
        if (c != s["output"]) beams.push_back(c.get<std::string>());
      }
      beams.push_back("nonsense");
      json j;
      j["sample_id"] = s["id"];
      j["items"] = beams;
      p << j.dump() << '\n';
    }
    std::ofstream r(out / "rating.jsonl");
    for (const auto& s : read_lines(corpus / "toy.rating.test.jsonl")) {
      r << json{{"sample_id", s["id"]}, {"score", s["output"] == "yes" ? 0.9 : 0.1}}.dump()
        << '\n';
    }
  }
  LoadedIdMap ids = load_id_map(config_->idmap_path());
  MetricsReport m = evaluate_run(out / "ranking.jsonl", corpus / "toy.ranking.test.truth.jsonl",
                                 Task::kRanking, &ids.ids);
  EXPECT_DOUBLE_EQ(*m.get("HR@1"), 1.0);
  EXPECT_DOUBLE_EQ(*m.get("NDCG@10"), 1.0);
  EXPECT_EQ(m.n_unparseable, ranking.size());
  EXPECT_EQ(m.n_missing, 0u);

  MetricsReport r = evaluate_run(out / "rating.jsonl", corpus / "toy.rating.test.truth.jsonl",
                                 Task::kRating, &ids.ids);
  ASSERT_TRUE(r.get("AUC-ROC").has_value());
  EXPECT_DOUBLE_EQ(*r.get("AUC-ROC"), 1.0);
}

TEST_F(AdapterContract, HarnessPredictionFormat) {
  cmd_predict(*config_, "popularity");
  json header;
  auto retrieval = read_lines(
      config_->prediction_path("popularity", Task::kRetrieval, SplitKind::kTest), &header);
  EXPECT_EQ(header["config_digest"], config_->digest());
  ASSERT_EQ(retrieval.size(),
            read_lines(config_->corpus_dir() / "toy.retrieval.test.truth.jsonl").size());
  for (const auto& j : retrieval) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"items", "sample_id"}));
    EXPECT_EQ(j["items"].size(), config_->k_max);
  }
  for (const auto& j :
       read_lines(config_->prediction_path("popularity", Task::kRating, SplitKind::kTest))) {
    EXPECT_TRUE(j["score"].is_number());
  }
}

}  // namespace
}  // namespace recprompt
