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

#include "recprompt/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace recprompt {

using json = nlohmann::json;

namespace {

constexpr std::string_view kUserField = "reviewerID";
constexpr std::string_view kItemField = "asin";
constexpr std::string_view kRatingField = "overall";
constexpr std::string_view kTimeField = "unixReviewTime";

bool valid_interaction(const RawInteraction& r) {
  return !r.user.empty() && !r.item.empty() && std::isfinite(r.rating) &&
         r.rating >= 1.0 && r.rating <= 5.0 && r.timestamp >= 0;
}

std::optional<RawInteraction> interaction_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  auto u = j.find(kUserField);
  auto i = j.find(kItemField);
  auto r = j.find(kRatingField);
  auto t = j.find(kTimeField);
  if (u == j.end() || i == j.end() || r == j.end() || t == j.end()) {
    return std::nullopt;
  }
  if (!u->is_string() || !i->is_string() || !r->is_number()) return std::nullopt;
  RawInteraction out;
  out.user = u->get<std::string>();
  out.item = i->get<std::string>();
  out.rating = r->get<double>();
  if (t->is_number_integer()) {
    out.timestamp = t->get<std::int64_t>();
  } else if (t->is_number_float() && std::floor(t->get<double>()) == t->get<double>()) {
    out.timestamp = static_cast<std::int64_t>(t->get<double>());
  } else {
    return std::nullopt;
  }
  if (!valid_interaction(out)) return std::nullopt;
  return out;
}

// One RFC 4180 record on a single line.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_started_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_started_quoted = false;
    } else if (c == '\r' && i + 1 == line.size()) {
      // CRLF line ending.
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

void check_malformed(const ParseResult& result, const ParseOptions& options) {
  if (result.n_records < options.min_records_for_check) return;
  double frac = static_cast<double>(result.n_skipped) /
                static_cast<double>(result.n_records);
  if (frac > options.max_malformed_fraction) {
    std::ostringstream os;
    os << "too many malformed records: " << result.n_skipped << " of "
       << result.n_records << " (" << 100.0 * frac << "%, limit "
       << 100.0 * options.max_malformed_fraction
       << "%); check the declared input format";
    throw Error(os.str());
  }
}

ParseResult parse_jsonl(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.n_records;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    std::optional<RawInteraction> rec;
    if (!j.is_discarded()) rec = interaction_from_json(j);
    if (rec) {
      result.interactions.push_back(std::move(*rec));
    } else {
      ++result.n_skipped;
    }
  }
  if (in.bad()) throw Error("read error while parsing interactions");
  check_malformed(result, options);
  return result;
}

ParseResult parse_csv(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) return result;
  auto header = split_csv_line(line);
  if (!header) throw Error("malformed CSV header");
  auto column = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) {
      throw Error("CSV header lacks required column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header->begin());
  };
  const std::size_t cu = column(kUserField), ci = column(kItemField),
                    cr = column(kRatingField), ct = column(kTimeField);
  const std::size_t needed = std::max({cu, ci, cr, ct}) + 1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.n_records;
    auto fields = split_csv_line(line);
    RawInteraction rec;
    bool ok = fields && fields->size() >= needed;
    if (ok) {
      rec.user = (*fields)[cu];
      rec.item = (*fields)[ci];
      ok = parse_number((*fields)[cr], rec.rating) &&
           parse_number((*fields)[ct], rec.timestamp) && valid_interaction(rec);
    }
    if (ok) {
      result.interactions.push_back(std::move(rec));
    } else {
      ++result.n_skipped;
    }
  }
  if (in.bad()) throw Error("read error while parsing interactions");
  check_malformed(result, options);
  return result;
}

std::optional<double> parse_price(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) return std::nullopt;
  std::string s = v.get<std::string>();
  std::string digits;
  bool seen_digit = false;
  for (char c : s) {
    if ((c >= '0' && c <= '9') || c == '.') {
      digits.push_back(c);
      seen_digit = true;
    } else if (c == ',' && seen_digit) {
      continue;
    } else if (seen_digit) {
      break;  // "$1.00 - $2.00" keeps the lower bound
    }
  }
  double out;
  if (!parse_number(std::string_view(digits), out)) return std::nullopt;
  return out;
}

void collect_strings(const json& v, std::vector<std::string>& out) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) {
      out.push_back(std::move(s));
    }
  } else if (v.is_array()) {
    for (const auto& e : v) collect_strings(e, out);
  }
}

std::optional<ItemMetadata> metadata_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  auto asin = j.find("asin");
  if (asin == j.end() || !asin->is_string() || asin->get<std::string>().empty()) {
    return std::nullopt;
  }
  ItemMetadata m;
  m.item = asin->get<std::string>();
  if (auto t = j.find("title"); t != j.end() && t->is_string()) {
    m.title = t->get<std::string>();
    m.title_missing = m.title.empty();
  }
  if (auto b = j.find("brand"); b != j.end() && b->is_string() &&
                                !b->get<std::string>().empty()) {
    m.brand = b->get<std::string>();
  }
  for (const char* key : {"categories", "category"}) {
    if (auto c = j.find(key); c != j.end()) collect_strings(*c, m.categories);
  }
  if (auto p = j.find("price"); p != j.end()) m.price = parse_price(*p);
  if (auto d = j.find("description"); d != j.end()) {
    std::vector<std::string> parts;
    collect_strings(*d, parts);
    std::string joined;
    for (const auto& part : parts) {
      if (!joined.empty()) joined.push_back(' ');
      joined += part;
    }
    if (!joined.empty()) m.description = std::move(joined);
  }
  return m;
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "amazon-review-jsonl" || name == "jsonl" || name == "json") {
    return InputFormat::kAmazonJsonl;
  }
  if (name == "csv") return InputFormat::kCsv;
  return std::nullopt;
}

ParseResult parse_interactions(std::istream& in, InputFormat format,
                               const ParseOptions& options) {
  if (!in.good() && !in.eof()) throw Error("interaction stream is unreadable");
  switch (format) {
    case InputFormat::kAmazonJsonl:
      return parse_jsonl(in, options);
    case InputFormat::kCsv:
      return parse_csv(in, options);
  }
  throw Error("unknown input format");
}

std::optional<std::string> python_literal_to_json(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\'' || c == '"') {
      const char quote = c;
      std::string value;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '\\' && i + 1 < text.size()) {
          char e = text[i + 1];
          i += 2;
          switch (e) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            case 'r': value.push_back('\r'); break;
            case '\\': value.push_back('\\'); break;
            case '\'': value.push_back('\''); break;
            case '"': value.push_back('"'); break;
            case 'x':
            case 'u': {
              std::size_t len = e == 'x' ? 2 : 4;
              if (i + len > text.size()) return std::nullopt;
              unsigned cp = 0;
              auto res = std::from_chars(text.data() + i, text.data() + i + len, cp, 16);
              if (res.ec != std::errc()) return std::nullopt;
              append_utf8(value, cp);
              i += len;
              break;
            }
            default:
              value.push_back('\\');
              value.push_back(e);
          }
        } else if (d == quote) {
          ++i;
          closed = true;
          break;
        } else {
          value.push_back(d);
          ++i;
        }
      }
      if (!closed) return std::nullopt;
      out += json(value).dump(-1, ' ', false, json::error_handler_t::replace);
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
      std::string_view word = text.substr(i, j - i);
      if (word == "True") out += "true";
      else if (word == "False") out += "false";
      else if (word == "None") out += "null";
      else return std::nullopt;
      i = j;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

MetadataResult parse_metadata(std::istream& in) {
  if (!in.good() && !in.eof()) throw Error("metadata stream is unreadable");
  MetadataResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.n_records;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      if (auto converted = python_literal_to_json(line)) {
        j = json::parse(*converted, nullptr, /*allow_exceptions=*/false);
      }
    }
    std::optional<ItemMetadata> m;
    if (!j.is_discarded()) m = metadata_from_json(j);
    if (m) {
      result.items.push_back(std::move(*m));
    } else {
      ++result.n_skipped;
    }
  }
  if (in.bad()) throw Error("read error while parsing metadata");
  return result;
}

std::vector<RawInteraction> dedupe(std::span<const RawInteraction> interactions) {
  std::unordered_map<std::string, std::size_t> best;
  best.reserve(interactions.size());
  std::string key;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    const auto& r = interactions[i];
    key.clear();
    key.append(r.user).push_back('\x1f');
    key.append(r.item);
    auto [it, inserted] = best.try_emplace(key, i);
    if (!inserted && r.timestamp < interactions[it->second].timestamp) {
      it->second = i;
    }
  }
  std::vector<char> keep(interactions.size(), 0);
  for (const auto& [k, idx] : best) keep[idx] = 1;
  std::vector<RawInteraction> out;
  out.reserve(best.size());
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    if (keep[i]) out.push_back(interactions[i]);
  }
  return out;
}

std::vector<RawInteraction> k_core_filter(std::span<const RawInteraction> interactions,
                                          int k) {
  if (k < 1) throw Error("k-core requires k >= 1");
  // Local dense ids: users occupy [0, n_users), items follow.
  std::unordered_map<std::string, std::uint32_t> user_ids, item_ids;
  std::vector<std::uint32_t> rec_user(interactions.size()), rec_item(interactions.size());
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    rec_user[i] = user_ids.try_emplace(interactions[i].user,
                                       static_cast<std::uint32_t>(user_ids.size()))
                      .first->second;
    rec_item[i] = item_ids.try_emplace(interactions[i].item,
                                       static_cast<std::uint32_t>(item_ids.size()))
                      .first->second;
  }
  const std::size_t n_users = user_ids.size();
  const std::size_t n_nodes = n_users + item_ids.size();
  std::vector<std::size_t> degree(n_nodes, 0);
  std::vector<std::vector<std::uint32_t>> incident(n_nodes);
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    std::size_t u = rec_user[i], v = n_users + rec_item[i];
    ++degree[u];
    ++degree[v];
    incident[u].push_back(static_cast<std::uint32_t>(i));
    incident[v].push_back(static_cast<std::uint32_t>(i));
  }
  const auto threshold = static_cast<std::size_t>(k);
  std::vector<char> removed(n_nodes, 0), queued(n_nodes, 0);
  std::vector<char> alive(interactions.size(), 1);
  std::deque<std::size_t> queue;
  for (std::size_t n = 0; n < n_nodes; ++n) {
    if (degree[n] < threshold) {
      queue.push_back(n);
      queued[n] = 1;
    }
  }
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    removed[n] = 1;
    for (std::uint32_t rec : incident[n]) {
      if (!alive[rec]) continue;
      alive[rec] = 0;
      std::size_t u = rec_user[rec], v = n_users + rec_item[rec];
      std::size_t other = (u == n) ? v : u;
      --degree[n];
      --degree[other];
      if (!removed[other] && !queued[other] && degree[other] < threshold) {
        queue.push_back(other);
        queued[other] = 1;
      }
    }
  }
  std::vector<RawInteraction> out;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    if (alive[i]) out.push_back(interactions[i]);
  }
  if (out.empty()) {
    throw Error("dataset too sparse for k-core (k=" + std::to_string(k) + ", " +
                std::to_string(interactions.size()) + " interactions in)");
  }
  return out;
}

SequenceTable build_sequences(std::span<const RawInteraction> interactions) {
  SequenceTable table;
  std::unordered_map<std::string, UserIdx> users;
  std::unordered_map<std::string, ItemIdx> items;
  for (const auto& r : interactions) {
    auto [uit, new_user] = users.try_emplace(r.user, static_cast<UserIdx>(users.size()));
    if (new_user) {
      table.user_ids.push_back(r.user);
      table.sequences.push_back(UserSequence{uit->second, {}});
    }
    auto [iit, new_item] = items.try_emplace(r.item, static_cast<ItemIdx>(items.size()));
    if (new_item) table.item_ids.push_back(r.item);
    table.sequences[uit->second].items.push_back(
        SequenceEntry{iit->second, r.rating, r.timestamp});
  }
  const auto& names = table.item_ids;
  for (auto& seq : table.sequences) {
    std::stable_sort(seq.items.begin(), seq.items.end(),
                     [&](const SequenceEntry& a, const SequenceEntry& b) {
                       if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                       return names[a.item] < names[b.item];
                     });
  }
  return table;
}

CorpusStats compute_stats(std::span<const UserSequence> sequences) {
  CorpusStats stats;
  std::vector<char> seen;
  for (const auto& seq : sequences) {
    if (seq.items.empty()) continue;
    ++stats.n_users;
    stats.n_interactions += seq.items.size();
    for (const auto& e : seq.items) {
      if (e.item >= seen.size()) seen.resize(e.item + 1, 0);
      if (!seen[e.item]) {
        seen[e.item] = 1;
        ++stats.n_items;
      }
    }
  }
  if (stats.n_users > 0 && stats.n_items > 0) {
    const double cells =
        static_cast<double>(stats.n_users) * static_cast<double>(stats.n_items);
    stats.sparsity = 100.0 * (1.0 - static_cast<double>(stats.n_interactions) / cells);
  }
  return stats;
}

std::vector<ItemMetadata> align_catalog(std::span<const std::string> item_ids,
                                        std::span<const ItemMetadata> metadata) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < metadata.size(); ++i) by_id.emplace(metadata[i].item, i);
  std::vector<ItemMetadata> catalog;
  catalog.reserve(item_ids.size());
  for (const auto& id : item_ids) {
    auto it = by_id.find(id);
    if (it != by_id.end()) {
      catalog.push_back(metadata[it->second]);
    } else {
      ItemMetadata m;
      m.item = id;
      catalog.push_back(std::move(m));
    }
  }
  return catalog;
}

namespace {

nlohmann::ordered_json metadata_to_json(const ItemMetadata& m) {
  nlohmann::ordered_json j;
  j["title"] = m.title;
  if (m.title_missing) j["title_missing"] = true;
  if (m.brand) j["brand"] = *m.brand;
  if (!m.categories.empty()) j["categories"] = m.categories;
  if (m.price) j["price"] = *m.price;
  if (m.description) j["description"] = *m.description;
  return j;
}

ItemMetadata metadata_from_snapshot(const json& j, const std::string& id) {
  ItemMetadata m;
  m.item = id;
  m.title = j.value("title", "");
  m.title_missing = j.value("title_missing", false);
  if (j.contains("brand")) m.brand = j["brand"].get<std::string>();
  if (j.contains("categories")) m.categories = j["categories"].get<std::vector<std::string>>();
  if (j.contains("price")) m.price = j["price"].get<double>();
  if (j.contains("description")) m.description = j["description"].get<std::string>();
  return m;
}

}  // namespace

void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot,
                   const FileHeader& header) {
  nlohmann::ordered_json doc;
  doc["header"] = header.to_json();
  doc["dataset"] = snapshot.dataset;
  const auto& rep = snapshot.report;
  doc["report"] = {{"n_records", rep.n_records},
                   {"n_skipped", rep.n_skipped},
                   {"n_after_dedupe", rep.n_after_dedupe},
                   {"n_after_kcore", rep.n_after_kcore},
                   {"n_metadata", rep.n_metadata},
                   {"n_missing_title", rep.n_missing_title},
                   {"k", rep.k}};
  doc["users"] = snapshot.table.user_ids;
  doc["items"] = snapshot.table.item_ids;
  auto& catalog = doc["catalog"] = nlohmann::ordered_json::array();
  for (const auto& m : snapshot.catalog) catalog.push_back(metadata_to_json(m));
  auto& seqs = doc["sequences"] = nlohmann::ordered_json::array();
  for (const auto& seq : snapshot.table.sequences) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : seq.items) entries.push_back({e.item, e.rating, e.timestamp});
    seqs.push_back(std::move(entries));
  }
  auto out = open_output(path);
  out << doc.dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path,
                       std::optional<FileHeader>* header) {
  json doc = read_json_document(path);
  try {
    if (header) *header = FileHeader::from_json(doc.at("header"));
    Snapshot s;
    s.dataset = doc.at("dataset").get<std::string>();
    const auto& rep = doc.at("report");
    s.report.n_records = rep.at("n_records").get<std::size_t>();
    s.report.n_skipped = rep.at("n_skipped").get<std::size_t>();
    s.report.n_after_dedupe = rep.at("n_after_dedupe").get<std::size_t>();
    s.report.n_after_kcore = rep.at("n_after_kcore").get<std::size_t>();
    s.report.n_metadata = rep.at("n_metadata").get<std::size_t>();
    s.report.n_missing_title = rep.at("n_missing_title").get<std::size_t>();
    s.report.k = rep.at("k").get<int>();
    s.table.user_ids = doc.at("users").get<std::vector<std::string>>();
    s.table.item_ids = doc.at("items").get<std::vector<std::string>>();
    const auto& catalog = doc.at("catalog");
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      s.catalog.push_back(metadata_from_snapshot(catalog[i], s.table.item_ids.at(i)));
    }
    const auto& seqs = doc.at("sequences");
    for (std::size_t u = 0; u < seqs.size(); ++u) {
      UserSequence seq{static_cast<UserIdx>(u), {}};
      for (const auto& e : seqs[u]) {
        seq.items.push_back(SequenceEntry{e.at(0).get<ItemIdx>(), e.at(1).get<double>(),
                                          e.at(2).get<std::int64_t>()});
      }
      s.table.sequences.push_back(std::move(seq));
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed snapshot: " + e.what());
  }
}

}  // namespace recprompt
