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

#include "recprompt/io.h"

#include <cstdio>
#include <sstream>

#include "recprompt/common.h"

namespace recprompt {

namespace fs = std::filesystem;
using json = nlohmann::json;

FileHeader FileHeader::make(std::uint64_t seed, std::string config_digest) {
  return FileHeader{std::string(kToolName), std::string(kToolVersion), seed,
                    std::move(config_digest)};
}

nlohmann::ordered_json FileHeader::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  return j;
}

FileHeader FileHeader::from_json(const json& j) {
  FileHeader h;
  h.tool = j.value("tool", "");
  h.version = j.value("version", "");
  h.seed = j.at("seed").get<std::uint64_t>();
  h.config_digest = j.value("config_digest", "");
  return h;
}

std::string FileHeader::to_comment() const {
  std::ostringstream os;
  os << "# tool=" << tool << " version=" << version << " seed=" << seed
     << " config=" << config_digest;
  return os.str();
}

std::optional<FileHeader> FileHeader::from_comment(const std::string& line) {
  if (line.rfind("# ", 0) != 0) return std::nullopt;
  std::istringstream is(line.substr(2));
  FileHeader h;
  bool have_seed = false;
  std::string field;
  while (is >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    std::string key = field.substr(0, eq);
    std::string value = field.substr(eq + 1);
    if (key == "tool") h.tool = value;
    else if (key == "version") h.version = value;
    else if (key == "config") h.config_digest = value;
    else if (key == "seed") {
      h.seed = std::stoull(value);
      have_seed = true;
    }
  }
  if (!have_seed) return std::nullopt;
  return h;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error("cannot create directory " + path.parent_path().string() +
                  ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

void write_jsonl_header(std::ostream& out, const FileHeader& header) {
  nlohmann::ordered_json line;
  line["header"] = header.to_json();
  out << line.dump() << '\n';
}

std::optional<FileHeader> read_jsonl_header(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains("header")) {
    return std::nullopt;
  }
  return FileHeader::from_json(j["header"]);
}

void for_each_jsonl(const fs::path& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": malformed JSON line");
    }
    if (line_no == 1 && j.is_object() && j.contains("header")) continue;
    fn(j, line_no);
  }
}

json read_json_document(const fs::path& path) {
  auto in = open_input(path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(path.string() + ": malformed JSON document");
  return j;
}

void write_json_document(const fs::path& path, const nlohmann::ordered_json& doc) {
  auto out = open_output(path);
  out << doc.dump(1) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

void require_artifact(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path)) {
    throw Error("missing artifact " + path.string() + " (run `" +
                std::string(kToolName) + " " + std::string(producer) +
                "` first)");
  }
}

void check_seed(const std::optional<FileHeader>& header, std::uint64_t expected,
                const fs::path& path) {
  if (!header) throw Error(path.string() + ": missing provenance header");
  if (header->seed != expected) {
    throw Error("seed mismatch: " + path.string() + " was produced with seed " +
                std::to_string(header->seed) + ", current seed is " +
                std::to_string(expected));
  }
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace recprompt
