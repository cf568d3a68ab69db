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

#ifndef RECPROMPT_TESTS_PIPELINE_FIXTURE_H_
#define RECPROMPT_TESTS_PIPELINE_FIXTURE_H_

#include <filesystem>
#include <string>

#include "recprompt/pipeline.h"
#include "recprompt/synthetic.h"

namespace recprompt::testing {

// Writes raw review and metadata files for `synth` under `dir` and returns a
// run config pointing at them, with outputs in dir/out.
inline RunConfig synthetic_run(const std::filesystem::path& dir, const SyntheticConfig& synth,
                               const std::string& dataset = "synth") {
  SyntheticDataset data = generate_synthetic(synth);
  std::filesystem::create_directories(dir);
  write_reviews_jsonl(dir / "reviews.jsonl", data.interactions);
  write_metadata_jsonl(dir / "meta.jsonl", data.metadata);
  RunConfig c;
  c.dataset = dataset;
  c.reviews = dir / "reviews.jsonl";
  c.metadata = dir / "meta.jsonl";
  c.out = dir / "out";
  c.seed = synth.seed;
  return c;
}

// ingest, split, gen and train.
inline void run_through_train(const RunConfig& c) {
  cmd_ingest(c);
  cmd_split(c);
  cmd_gen(c);
  cmd_train(c);
}

}  // namespace recprompt::testing

#endif  // RECPROMPT_TESTS_PIPELINE_FIXTURE_H_
