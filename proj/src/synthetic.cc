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

#include "recprompt/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "recprompt/io.h"
#include "recprompt/rng.h"

namespace recprompt {

namespace {

constexpr const char* kNouns[] = {"Serum",  "Lipstick", "Shampoo", "Mascara", "Cleanser",
                                  "Lotion", "Polish",   "Brush",   "Toner",   "Palette"};

// Zipf-weighted draw over a fixed item list.
class WeightedPool {
 public:
  WeightedPool(std::vector<std::size_t> items, double exponent) : items_(std::move(items)) {
    double total = 0.0;
    for (std::size_t r = 0; r < items_.size(); ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_.push_back(total);
    }
  }

  std::size_t draw(Rng& rng) const {
    const double x = uniform_unit(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
    return items_[std::min(idx, items_.size() - 1)];
  }

  const std::vector<std::size_t>& items() const { return items_; }

 private:
  std::vector<std::size_t> items_;
  std::vector<double> cumulative_;
};

std::string padded(char prefix, std::size_t value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%09zu", prefix, value);
  return buf;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticConfig& c) {
  if (c.n_items == 0 || c.n_users == 0) throw Error("synthetic dataset needs users and items");
  if (c.min_length < 3 || c.max_length < c.min_length) {
    throw Error("synthetic lengths must satisfy 3 <= min_length <= max_length");
  }
  if (c.n_clusters == 0) throw Error("synthetic dataset needs at least one cluster");
  const std::size_t cluster_size = c.n_items / c.n_clusters;
  if (cluster_size < c.max_length + 1) {
    throw Error("clusters too small for max_length distinct items");
  }

  Rng rng(derive_seed(c.seed, "synthetic"));
  SyntheticDataset d;
  d.item_cluster.resize(c.n_items);
  std::vector<std::vector<std::size_t>> members(c.n_clusters);
  for (std::size_t j = 0; j < c.n_items; ++j) {
    d.item_cluster[j] = j % c.n_clusters;
    members[j % c.n_clusters].push_back(j);
  }
  std::vector<WeightedPool> pools;
  for (auto& m : members) pools.emplace_back(m, c.zipf_exponent);
  std::vector<std::size_t> all(c.n_items);
  std::iota(all.begin(), all.end(), std::size_t{0});
  WeightedPool global(all, c.zipf_exponent);

  // One long cycle per cluster keeps chained walks repeat-free.
  d.successor.resize(c.n_items);
  for (auto m : members) {
    shuffle(std::span<std::size_t>(m), rng);
    for (std::size_t i = 0; i < m.size(); ++i) d.successor[m[i]] = m[(i + 1) % m.size()];
  }

  for (std::size_t j = 0; j < c.n_items; ++j) d.item_ids.push_back(padded('B', j));

  d.user_cluster.resize(c.n_users);
  std::vector<char> used(c.n_items, 0);
  for (std::size_t u = 0; u < c.n_users; ++u) {
    const std::size_t cluster = uniform_index(rng, c.n_clusters);
    d.user_cluster[u] = cluster;
    const std::size_t length =
        c.min_length + uniform_index(rng, c.max_length - c.min_length + 1);
    const double like = c.like_min + (c.like_max - c.like_min) * uniform_unit(rng);
    const std::string user = padded('A', u);
    std::vector<std::size_t> seq;
    while (seq.size() < length) {
      std::size_t next = c.n_items;
      if (!seq.empty() && uniform_unit(rng) < c.chain_prob) {
        const std::size_t s = d.successor[seq.back()];
        if (!used[s]) next = s;
      }
      for (int attempt = 0; next == c.n_items && attempt < 64; ++attempt) {
        const bool own = uniform_unit(rng) < c.cluster_affinity;
        const std::size_t cand = own ? pools[cluster].draw(rng) : global.draw(rng);
        if (!used[cand]) next = cand;
      }
      if (next == c.n_items) {
        for (std::size_t cand : members[cluster]) {
          if (!used[cand]) {
            next = cand;
            break;
          }
        }
      }
      used[next] = 1;
      seq.push_back(next);
    }
    for (std::size_t pos = 0; pos < seq.size(); ++pos) {
      RawInteraction r;
      r.user = user;
      r.item = d.item_ids[seq[pos]];
      r.rating = uniform_unit(rng) < like ? static_cast<double>(4 + uniform_index(rng, 2))
                                          : static_cast<double>(1 + uniform_index(rng, 3));
      r.timestamp = c.start_time + static_cast<std::int64_t>(pos) * 86400 +
                    static_cast<std::int64_t>(u % 86400);
      d.interactions.push_back(std::move(r));
    }
    for (std::size_t j : seq) used[j] = 0;
  }

  for (std::size_t j = 0; j < c.n_items; ++j) {
    if (uniform_unit(rng) < c.missing_title_fraction) continue;
    ItemMetadata m;
    m.item = d.item_ids[j];
    m.title = "Synthetic " + std::string(kNouns[j % std::size(kNouns)]) + " " + std::to_string(j);
    m.title_missing = false;
    m.brand = "Brand" + std::to_string(j % 17);
    m.categories = {"Beauty", "Cluster " + std::to_string(d.item_cluster[j])};
    m.price = static_cast<double>(j % 50) + 0.99;
    if (j % 3 != 0) m.description = "A planted catalog item number " + std::to_string(j) + ".";
    d.metadata.push_back(std::move(m));
  }
  return d;
}

void write_reviews_jsonl(const std::filesystem::path& path,
                         std::span<const RawInteraction> interactions) {
  auto out = open_output(path);
  for (const auto& r : interactions) {
    nlohmann::ordered_json j;
    j["reviewerID"] = r.user;
    j["asin"] = r.item;
    j["overall"] = r.rating;
    j["unixReviewTime"] = r.timestamp;
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

void write_metadata_jsonl(const std::filesystem::path& path,
                          std::span<const ItemMetadata> metadata) {
  auto out = open_output(path);
  for (const auto& m : metadata) {
    nlohmann::ordered_json j;
    j["asin"] = m.item;
    if (!m.title_missing) j["title"] = m.title;
    if (m.brand) j["brand"] = *m.brand;
    if (!m.categories.empty()) j["categories"] = nlohmann::ordered_json::array({m.categories});
    if (m.price) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "$%.2f", *m.price);
      j["price"] = buf;
    }
    if (m.description) j["description"] = *m.description;
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace recprompt
