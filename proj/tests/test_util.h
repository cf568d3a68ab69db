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

#ifndef RECPROMPT_TESTS_TEST_UTIL_H_
#define RECPROMPT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "recprompt/ingest.h"
#include "recprompt/rng.h"
#include "recprompt/split.h"

namespace recprompt::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("recprompt_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::vector<SequenceEntry> entries(const std::vector<ItemIdx>& items,
                                          const std::vector<double>& ratings = {}) {
  std::vector<SequenceEntry> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({items[i], ratings.empty() ? 5.0 : ratings[i],
                   static_cast<std::int64_t>(1000 + i)});
  }
  return out;
}

// Leave-one-out split over full per-user item sequences.
inline DatasetSplit make_split(const std::vector<std::vector<ItemIdx>>& sequences,
                               std::size_t n_valid = kDefaultValidationUsers) {
  std::vector<UserSequence> seqs;
  for (std::size_t u = 0; u < sequences.size(); ++u) {
    seqs.push_back({static_cast<UserIdx>(u), entries(sequences[u])});
  }
  DatasetSplit split = apply_leave_one_out(seqs);
  split.valid_users = select_validation_users(seqs.size(), 1, n_valid);
  return split;
}

// Display id "I<j>" for item j.
inline IdMap plain_ids(std::size_t n) {
  std::vector<std::string> forward;
  for (std::size_t j = 0; j < n; ++j) forward.push_back("I" + std::to_string(j));
  return IdMap(std::move(forward), 0);
}

inline std::vector<ItemMetadata> plain_catalog(std::size_t n) {
  std::vector<ItemMetadata> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j].item = "raw" + std::to_string(j);
    out[j].title = "Title " + std::to_string(j);
    out[j].title_missing = false;
  }
  return out;
}

}  // namespace recprompt::testing

#endif  // RECPROMPT_TESTS_TEST_UTIL_H_
