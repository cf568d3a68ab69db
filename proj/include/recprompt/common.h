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

#ifndef RECPROMPT_COMMON_H_
#define RECPROMPT_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace recprompt {

inline constexpr std::string_view kToolName = "recprompt";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Every fatal condition in the library surfaces as this exception type. The
// message names the offending input so the CLI can print it verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense indices assigned by ingest.
using UserIdx = std::uint32_t;
using ItemIdx = std::uint32_t;

}  // namespace recprompt

#endif  // RECPROMPT_COMMON_H_
