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

// recprompt: ingest, split, gen, train, predict, eval, stats, synth, run.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "recprompt/pipeline.h"
#include "recprompt/synthetic.h"

namespace {

using recprompt::RunConfig;
using recprompt::SplitKind;

struct Flags {
  std::string config;
  std::string dataset, reviews, metadata, format, out, tasks;
  std::uint64_t seed = 0;
  std::size_t window_size = 0, pool_size = 0, epochs = 0, jobs = 0, valid_users = 0;
  std::size_t k_max = 0, dim = 0, bpr_epochs = 0, bpr_steps = 0;
  int k_core = 0;
  double mask_ratio = 0, learning_rate = 0, l2 = 0;
  std::string model = "bpr-mf";
  std::string split = "test";
  std::string reference;
};

RunConfig resolve(const CLI::App& app, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : recprompt::load_run_config(f.config);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--dataset")) c.dataset = f.dataset;
  if (given("--reviews")) c.reviews = f.reviews;
  if (given("--metadata")) c.metadata = f.metadata;
  if (given("--format")) c.format = f.format;
  if (given("--out")) c.out = f.out;
  if (given("--k-core")) c.k_core = f.k_core;
  if (given("--seed")) c.seed = f.seed;
  if (given("--window-size")) c.window_size = f.window_size;
  if (given("--mask-ratio")) c.mask_ratio = f.mask_ratio;
  if (given("--pool-size")) c.pool_size = f.pool_size;
  if (given("--epochs")) c.epochs = f.epochs;
  if (given("--tasks")) c.tasks = recprompt::parse_task_list(f.tasks);
  if (given("--valid-users")) c.valid_users = f.valid_users;
  if (given("--k-max")) c.k_max = f.k_max;
  if (given("--dim")) c.bpr.dim = f.dim;
  if (given("--learning-rate")) c.bpr.learning_rate = f.learning_rate;
  if (given("--l2")) c.bpr.l2 = f.l2;
  if (given("--bpr-epochs")) c.bpr.epochs = f.bpr_epochs;
  if (given("--bpr-steps")) c.bpr.steps = f.bpr_steps;
  if (given("--jobs")) c.jobs = f.jobs;
  return c;
}

SplitKind parse_split(const std::string& name) {
  if (name == "valid") return SplitKind::kValid;
  if (name == "test") return SplitKind::kTest;
  throw recprompt::Error("--split must be valid or test");
}

void print_reports(const std::vector<recprompt::MetricsReport>& reports) {
  for (const auto& r : reports) {
    std::cout << r.table();
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt corpora and reference evaluation for sequential recommendation"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config file; flags override it");
  app.add_option("--dataset", f.dataset, "Dataset name used in file names");
  app.add_option("--reviews", f.reviews, "Raw interaction file");
  app.add_option("--metadata", f.metadata, "Raw item metadata file");
  app.add_option("--format", f.format, "amazon-review-jsonl or csv");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--k-core", f.k_core, "Core size for filtering");
  app.add_option("--seed", f.seed, "Global seed");
  app.add_option("--window-size", f.window_size, "Sliding window size");
  app.add_option("--mask-ratio", f.mask_ratio, "MIM masking ratio");
  app.add_option("--pool-size", f.pool_size, "Ranking candidate pool size");
  app.add_option("--epochs", f.epochs, "Dynamic sampling epochs");
  app.add_option("--tasks", f.tasks, "Comma-separated task list");
  app.add_option("--valid-users", f.valid_users, "Validation user cap");
  app.add_option("--k-max", f.k_max, "Retrieval list length");
  app.add_option("--dim", f.dim, "BPR-MF factor dimension");
  app.add_option("--learning-rate", f.learning_rate, "BPR-MF learning rate");
  app.add_option("--l2", f.l2, "BPR-MF L2 weight");
  app.add_option("--bpr-epochs", f.bpr_epochs, "BPR-MF epochs");
  app.add_option("--bpr-steps", f.bpr_steps, "BPR-MF total SGD steps");
  app.add_option("--jobs", f.jobs, "Worker threads");

  auto* synth = app.add_subcommand("synth", "Write a synthetic review and metadata file");
  recprompt::SyntheticConfig sc;
  synth->add_option("--users", sc.n_users);
  synth->add_option("--items", sc.n_items);
  synth->add_option("--min-length", sc.min_length);
  synth->add_option("--max-length", sc.max_length);
  synth->add_option("--zipf", sc.zipf_exponent);
  synth->add_option("--clusters", sc.n_clusters);
  synth->add_option("--affinity", sc.cluster_affinity);
  synth->add_option("--chain-prob", sc.chain_prob);
  synth->add_option("--missing-titles", sc.missing_title_fraction);

  auto* ingest = app.add_subcommand("ingest", "Parse, dedupe and k-core a raw dataset");
  auto* split = app.add_subcommand("split", "Assign display ids and leave-one-out splits");
  auto* gen = app.add_subcommand("gen", "Generate prompt corpora and truth files");
  auto* train = app.add_subcommand("train", "Train BPR-MF");
  auto* predict = app.add_subcommand("predict", "Emit reference-model predictions");
  auto* eval = app.add_subcommand("eval", "Score predictions against truth files");
  auto* stats = app.add_subcommand("stats", "Print dataset and corpus statistics");
  auto* run = app.add_subcommand("run", "ingest, split, gen, train, predict and eval");
  for (auto* sub : {predict, eval, run}) {
    sub->add_option("--model", f.model, "popularity, history, markov or bpr-mf");
    sub->add_option("--split", f.split, "valid or test");
  }
  stats->add_option("--reference", f.reference, "toys, beauty or sports");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = resolve(app, f);
    if (synth->parsed()) {
      sc.seed = c.seed;
      auto d = recprompt::generate_synthetic(sc);
      const auto reviews = c.reviews.empty() ? c.out / "raw" / "reviews.jsonl" : c.reviews;
      const auto metadata = c.metadata.empty() ? c.out / "raw" / "metadata.jsonl" : c.metadata;
      recprompt::write_reviews_jsonl(reviews, d.interactions);
      recprompt::write_metadata_jsonl(metadata, d.metadata);
      std::cout << "wrote " << d.interactions.size() << " reviews to " << reviews.string()
                << " and " << d.metadata.size() << " items to " << metadata.string() << '\n';
      return 0;
    }
    if (ingest->parsed() || run->parsed()) {
      auto r = recprompt::cmd_ingest(c);
      std::cout << "ingest: " << r.n_records << " records, " << r.n_skipped << " skipped, "
                << r.n_after_dedupe << " after dedupe, " << r.n_after_kcore << " after "
                << r.k << "-core, " << r.n_missing_title << " items without title\n";
    }
    if (split->parsed() || run->parsed()) {
      recprompt::cmd_split(c);
      std::cout << "split: wrote " << c.idmap_path().string() << " and "
                << c.split_path().string() << '\n';
    }
    if (gen->parsed() || run->parsed()) {
      auto s = recprompt::cmd_gen(c);
      for (const auto& file : s.files) {
        std::cout << file.n_samples << '\t' << file.path.string() << '\n';
      }
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      if (s.missing_titles > 0) {
        std::cerr << "warning: " << s.missing_titles << " item renderings had no title\n";
      }
    }
    const bool needs_model = f.model == "bpr-mf";
    if (train->parsed() || (run->parsed() && needs_model)) {
      auto r = recprompt::cmd_train(c);
      for (std::size_t e = 0; e < r.epoch_losses.size(); ++e) {
        std::printf("epoch %zu loss %.6f\n", e + 1, r.epoch_losses[e]);
      }
    }
    if (predict->parsed() || run->parsed()) {
      for (const auto& p : recprompt::cmd_predict(c, f.model, parse_split(f.split))) {
        std::cout << "wrote " << p.string() << '\n';
      }
    }
    if (eval->parsed() || run->parsed()) {
      print_reports(recprompt::cmd_eval(c, f.model, parse_split(f.split)));
    }
    if (stats->parsed()) {
      auto r = recprompt::cmd_stats(
          c, f.reference.empty() ? std::nullopt : std::optional<std::string>(f.reference));
      recprompt::print_stats(r, std::cout);
      return r.mismatches.empty() ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "recprompt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
