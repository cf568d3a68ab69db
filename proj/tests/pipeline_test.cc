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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pipeline_fixture.h"
#include "test_util.h"

namespace recprompt {
namespace {

using nlohmann::json;

SyntheticConfig small_synth(std::uint64_t seed = 5) {
  SyntheticConfig s;
  s.n_users = 150;
  s.n_items = 120;
  s.min_length = 5;
  s.max_length = 25;
  s.seed = seed;
  return s;
}

std::vector<std::filesystem::path> tree(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(std::filesystem::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(RunConfig, FromJson) {
  RunConfig c = RunConfig::from_json(json::parse(
      R"({"dataset":"toys","seed":7,"window_size":10,"tasks":"retrieval,mim","dim":8})"));
  EXPECT_EQ(c.dataset, "toys");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.window_size, 10u);
  EXPECT_EQ(c.tasks, (std::vector<Task>{Task::kRetrieval, Task::kMim}));
  EXPECT_EQ(c.bpr.dim, 8u);
  EXPECT_EQ(c.pool_size, 100u);
  RunConfig arr = RunConfig::from_json(json::parse(R"({"tasks":["bpr","ie"]})"));
  EXPECT_EQ(arr.tasks, (std::vector<Task>{Task::kBpr, Task::kIe}));

  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"windowsize":3})")), Error);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"seed":"x"})")), Error);
  EXPECT_THROW(RunConfig::from_json(json::parse(R"({"tasks":["nope"]})")), Error);
}

TEST(RunConfig, DigestIgnoresPathsAndJobs) {
  RunConfig a, b;
  b.out = "elsewhere";
  b.jobs = 8;
  b.reviews = "r.jsonl";
  EXPECT_EQ(a.digest(), b.digest());
  b.seed = 43;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.format = "xml";
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.dataset = "a.b";
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.window_size = 1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(RunConfig, LoadFile) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "c.json");
    out << R"({"seed": 3, "epochs": 2})";
  }
  RunConfig c = load_run_config(dir / "c.json");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.epochs, 2u);
  {
    std::ofstream out(dir / "bad.json");
    out << "{seed: 3";
  }
  EXPECT_THROW(load_run_config(dir / "bad.json"), Error);
  EXPECT_THROW(load_run_config(dir / "none.json"), Error);
}

TEST(Pipeline, MissingArtifactNamesProducer) {
  testing::TempDir dir;
  RunConfig c;
  c.out = dir / "out";
  try {
    cmd_split(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("run `recprompt ingest` first"), std::string::npos)
        << e.what();
  }
}

TEST(Pipeline, EndToEndIsIdempotent) {
  testing::TempDir dir;
  RunConfig c = testing::synthetic_run(dir.path(), small_synth());
  c.window_size = 10;
  c.pool_size = 20;
  c.epochs = 2;
  c.bpr.dim = 8;
  c.bpr.epochs = 2;
  c.jobs = 2;
  testing::run_through_train(c);
  for (const char* model : {"popularity", "history", "markov", "bpr-mf"}) {
    cmd_predict(c, model);
    auto reports = cmd_eval(c, model);
    ASSERT_EQ(reports.size(), 3u) << model;
    for (const auto& r : reports) {
      EXPECT_EQ(r.n_missing, 0u);
      EXPECT_EQ(r.n_unparseable, 0u);
    }
  }
  EXPECT_TRUE(std::filesystem::exists(c.report_path("bpr-mf", SplitKind::kTest, "json")));
  EXPECT_TRUE(std::filesystem::exists(c.report_path("bpr-mf", SplitKind::kTest, "txt")));

  auto files = tree(c.out);
  std::map<std::filesystem::path, std::string> first;
  for (const auto& f : files) first[f] = testing::read_file(c.out / f);

  c.jobs = 1;
  testing::run_through_train(c);
  for (const char* model : {"popularity", "history", "markov", "bpr-mf"}) {
    cmd_predict(c, model);
    cmd_eval(c, model);
  }
  EXPECT_EQ(tree(c.out), files);
  for (const auto& f : files) EXPECT_EQ(testing::read_file(c.out / f), first[f]) << f;
}

TEST(Pipeline, SeedMismatchIsFatal) {
  testing::TempDir dir;
  RunConfig c = testing::synthetic_run(dir.path(), small_synth());
  cmd_ingest(c);
  cmd_split(c);
  RunConfig other = c;
  other.seed = c.seed + 1;
  try {
    cmd_gen(other);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("seed mismatch"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, SplitFileListsValidationUsers) {
  testing::TempDir dir;
  RunConfig c = testing::synthetic_run(dir.path(), small_synth());
  c.valid_users = 40;
  cmd_ingest(c);
  cmd_split(c);
  std::ifstream in(c.split_path());
  json split = json::parse(in);
  EXPECT_EQ(split["valid_users"].size(), 40u);
  EXPECT_EQ(split["n_users"].get<std::size_t>(), 150u);
  auto ids = load_id_map(c.idmap_path());
  EXPECT_EQ(ids.ids.size(), split["n_items"].get<std::size_t>());
}

TEST(Pipeline, StatsWindowCounts) {
  testing::TempDir dir;
  RunConfig c = testing::synthetic_run(dir.path(), small_synth());
  c.window_size = 10;
  cmd_ingest(c);
  cmd_split(c);
  StatsReport r = cmd_stats(c, std::nullopt);
  PreparedData d = load_prepared(c);
  std::size_t train = 0;
  for (const auto& u : d.split.users) train += train_window_count(u.train.size(), 10);
  for (const auto& t : r.tasks) {
    if (t.dynamic) {
      EXPECT_EQ(t.train, 0u);
      EXPECT_EQ(t.valid, 0u);
      EXPECT_EQ(t.test, 0u);
      continue;
    }
    if (t.task == Task::kIe) continue;
    EXPECT_EQ(t.train, train) << task_name(t.task);
    EXPECT_EQ(t.valid, 150u);
    EXPECT_EQ(t.test, 150u);
  }
  EXPECT_EQ(r.corpus.n_users, 150u);
  EXPECT_TRUE(r.mismatches.empty());

  StatsReport ref = cmd_stats(c, std::string("toys"));
  EXPECT_FALSE(ref.mismatches.empty());
  std::ostringstream os;
  print_stats(ref, os);
  EXPECT_NE(os.str().find("DS"), std::string::npos);
  EXPECT_THROW(cmd_stats(c, std::string("movies")), Error);
}

}  // namespace
}  // namespace recprompt
