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

#ifndef RECPROMPT_RNG_H_
#define RECPROMPT_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace recprompt {

// mt19937_64 is bit-specified by the standard; the distributions in <random>
// are not, so all draws go through the helpers below to keep corpora
// identical across standard libraries.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

// Child seed for a named pipeline stage ("idmap", "valid_users", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

// Seed of the private stream owned by one generated sample.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view task,
                          std::string_view split, std::uint64_t user,
                          std::uint64_t window, std::uint64_t epoch);

// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace recprompt

#endif  // RECPROMPT_RNG_H_
