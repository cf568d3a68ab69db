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

#ifndef RECPROMPT_IO_H_
#define RECPROMPT_IO_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

namespace recprompt {

// Provenance stamped on every emitted artifact. JSONL files carry it as the
// first line ({"header": {...}}); JSON documents carry it under "header";
// TSV files carry it as a leading '#' comment line.
struct FileHeader {
  std::string tool;
  std::string version;
  std::uint64_t seed = 0;
  std::string config_digest;

  static FileHeader make(std::uint64_t seed, std::string config_digest);
  nlohmann::ordered_json to_json() const;
  static FileHeader from_json(const nlohmann::json& j);
  std::string to_comment() const;
  static std::optional<FileHeader> from_comment(const std::string& line);
};

// Opens `path` for writing, creating parent directories. Throws Error on
// failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

// Writes the header line of a JSONL file.
void write_jsonl_header(std::ostream& out, const FileHeader& header);

// Reads the header line of a JSONL file, if it has one.
std::optional<FileHeader> read_jsonl_header(const std::filesystem::path& path);

// Iterates over the data lines of a JSONL file, skipping the header line and
// blank lines. The callback receives the 1-based line number.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

nlohmann::json read_json_document(const std::filesystem::path& path);
void write_json_document(const std::filesystem::path& path,
                         const nlohmann::ordered_json& doc);

// Fails with a message naming the missing artifact and the command that
// produces it.
void require_artifact(const std::filesystem::path& path, std::string_view producer);

// Fails unless `found` matches `expected`.
void check_seed(const std::optional<FileHeader>& header, std::uint64_t expected,
                const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

}  // namespace recprompt

#endif  // RECPROMPT_IO_H_
