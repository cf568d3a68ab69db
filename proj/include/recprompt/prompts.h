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

// Prompt text templates. These functions only format strings; choosing
// windows, masks, negatives and orderings happens in sample_gen.

#ifndef RECPROMPT_PROMPTS_H_
#define RECPROMPT_PROMPTS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recprompt::prompts {

inline constexpr std::string_view kPurchasePreamble =
    "A user has purchased the following Amazon products (arranged in "
    "chronological order, from earliest to most recent): ";
inline constexpr std::string_view kRetrievalQuestion = "What would the user buy next?";
inline constexpr std::string_view kRankingQuestion =
    "Which of the following candidate items would you recommend the user to buy "
    "next? Candidate items are: ";
inline constexpr std::string_view kLikesPreamble =
    "A user likes the following Amazon products: ";
inline constexpr std::string_view kDislikesPreamble =
    "The user dislikes the following Amazon products: ";
// Used when the likes section is omitted and dislikes open the prompt.
inline constexpr std::string_view kDislikesOnlyPreamble =
    "A user dislikes the following Amazon products: ";
inline constexpr std::string_view kRatingQuestion =
    "Predict whether the user would like the following item. Answer yes or no. ";
inline constexpr std::string_view kMaskedItem = "[masked item];";
inline constexpr std::string_view kMimQuestion =
    "What are the masked items, in chronological order?";
inline constexpr std::string_view kBprQuestion =
    "Which of the following two items would the user buy next? ";

struct ItemText {
  std::string_view id;
  std::string_view title;
};

// "Item ID: <id>, Title: <title>" (no terminator).
std::string item_text(const ItemText& item);

// Items rendered as "Item ID: <id>, Title: <title>;" joined by single spaces.
std::string item_list(std::span<const ItemText> items);

std::string retrieval_input(std::span<const ItemText> history);

std::string ranking_input(std::span<const ItemText> history,
                          std::span<const std::string> candidate_ids);

// Either section may be empty, in which case it is left out.
std::string rating_input(std::span<const ItemText> likes,
                         std::span<const ItemText> dislikes, const ItemText& target);

// `masked[i]` replaces window item i with the mask token.
std::string mim_input(std::span<const ItemText> window, std::span<const bool> masked);
std::string mim_output(std::span<const ItemText> masked_items);

std::string mlm_input(std::span<const ItemText> items);

std::string bpr_input(std::span<const ItemText> history, const ItemText& first,
                      const ItemText& second);
std::string bpr_output(const ItemText& positive);

// Item-content question/answer pair.
struct QaPair {
  std::string question;
  std::string answer;
};
QaPair ie_pair(std::string_view field, std::string_view display_id,
               std::string_view answer);

}  // namespace recprompt::prompts

#endif  // RECPROMPT_PROMPTS_H_
