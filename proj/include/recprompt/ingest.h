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

// Log ingestion: parsing of review and catalog records, deduplication,
// k-core filtering and construction of chronological user sequences.

#ifndef RECPROMPT_INGEST_H_
#define RECPROMPT_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recprompt/common.h"
#include "recprompt/io.h"

namespace recprompt {

struct RawInteraction {
  std::string user;
  std::string item;
  double rating = 0.0;       // [1, 5]
  std::int64_t timestamp = 0;  // seconds since epoch

  bool operator==(const RawInteraction&) const = default;
};

struct ItemMetadata {
  std::string item;
  std::string title;
  bool title_missing = true;
  std::optional<std::string> brand;
  std::vector<std::string> categories;
  std::optional<double> price;
  std::optional<std::string> description;
};

enum class InputFormat { kAmazonJsonl, kCsv };

std::optional<InputFormat> parse_input_format(std::string_view name);

struct ParseOptions {
  // Parsing fails when more than this fraction of records is malformed...
  double max_malformed_fraction = 0.10;
  // ...but only once the input holds at least this many records.
  std::size_t min_records_for_check = 20;
};

struct ParseResult {
  std::vector<RawInteraction> interactions;
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;
};

ParseResult parse_interactions(std::istream& in, InputFormat format,
                               const ParseOptions& options = {});

struct MetadataResult {
  std::vector<ItemMetadata> items;
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;
};

// Accepts strict JSON lines and the Python-literal dict lines used by older
// catalog dumps.
MetadataResult parse_metadata(std::istream& in);

// Rewrites a Python dict/list literal as JSON. Returns nullopt when the text
// is not a literal this converter understands.
std::optional<std::string> python_literal_to_json(std::string_view text);

// Keeps the earliest occurrence of each (user, item) pair; equal timestamps
// keep the first record in input order. Output preserves input order.
std::vector<RawInteraction> dedupe(std::span<const RawInteraction> interactions);

// Iterative pruning to the maximal sub-multiset in which every user and every
// item has at least k interactions. Output preserves input order. Throws
// Error when nothing survives.
std::vector<RawInteraction> k_core_filter(std::span<const RawInteraction> interactions,
                                          int k);

struct SequenceEntry {
  ItemIdx item = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  bool operator==(const SequenceEntry&) const = default;
};

struct UserSequence {
  UserIdx user = 0;
  std::vector<SequenceEntry> items;
};

struct SequenceTable {
  std::vector<UserSequence> sequences;  // indexed by user idx
  std::vector<std::string> user_ids;    // user idx -> raw id
  std::vector<std::string> item_ids;    // item idx -> raw id
};

// Dense ids follow first appearance in `interactions`; each user's items are
// ordered by (timestamp, raw item id).
SequenceTable build_sequences(std::span<const RawInteraction> interactions);

struct CorpusStats {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_interactions = 0;
  double sparsity = 0.0;  // percent
};

CorpusStats compute_stats(std::span<const UserSequence> sequences);

struct IngestReport {
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;
  std::size_t n_after_dedupe = 0;
  std::size_t n_after_kcore = 0;
  std::size_t n_metadata = 0;
  std::size_t n_missing_title = 0;
  int k = 5;
};

struct Snapshot {
  std::string dataset;
  SequenceTable table;
  std::vector<ItemMetadata> catalog;  // indexed by item idx
  IngestReport report;
};

// Aligns parsed metadata with the item index; items without a record get an
// entry flagged as missing its title.
std::vector<ItemMetadata> align_catalog(std::span<const std::string> item_ids,
                                        std::span<const ItemMetadata> metadata);

void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot,
                   const FileHeader& header);
Snapshot load_snapshot(const std::filesystem::path& path,
                       std::optional<FileHeader>* header = nullptr);

}  // namespace recprompt

#endif  // RECPROMPT_INGEST_H_
