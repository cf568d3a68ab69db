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

#include "recprompt/prompts.h"

namespace recprompt::prompts {

std::string item_text(const ItemText& item) {
  std::string out;
  out.reserve(item.id.size() + item.title.size() + 18);
  out += "Item ID: ";
  out += item.id;
  out += ", Title: ";
  out += item.title;
  return out;
}

std::string item_list(std::span<const ItemText> items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += item_text(items[i]);
    out.push_back(';');
  }
  return out;
}

std::string retrieval_input(std::span<const ItemText> history) {
  std::string out(kPurchasePreamble);
  out += item_list(history);
  out.push_back(' ');
  out += kRetrievalQuestion;
  return out;
}

std::string ranking_input(std::span<const ItemText> history,
                          std::span<const std::string> candidate_ids) {
  std::string out(kPurchasePreamble);
  out += item_list(history);
  out.push_back(' ');
  out += kRankingQuestion;
  for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
    if (i > 0) out += ", ";
    out += candidate_ids[i];
  }
  out.push_back('.');
  return out;
}

std::string rating_input(std::span<const ItemText> likes,
                         std::span<const ItemText> dislikes, const ItemText& target) {
  std::string out;
  if (!likes.empty()) {
    out += kLikesPreamble;
    out += item_list(likes);
    out.push_back(' ');
  }
  if (!dislikes.empty()) {
    out += likes.empty() ? kDislikesOnlyPreamble : kDislikesPreamble;
    out += item_list(dislikes);
    out.push_back(' ');
  }
  out += kRatingQuestion;
  out += item_text(target);
  return out;
}

std::string mim_input(std::span<const ItemText> window, std::span<const bool> masked) {
  std::string out(kPurchasePreamble);
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (i > 0) out.push_back(' ');
    if (masked[i]) {
      out += kMaskedItem;
    } else {
      out += item_text(window[i]);
      out.push_back(';');
    }
  }
  out.push_back(' ');
  out += kMimQuestion;
  return out;
}

std::string mim_output(std::span<const ItemText> masked_items) {
  return item_list(masked_items);
}

std::string mlm_input(std::span<const ItemText> items) { return item_list(items); }

std::string bpr_input(std::span<const ItemText> history, const ItemText& first,
                      const ItemText& second) {
  std::string out(kPurchasePreamble);
  out += item_list(history);
  out.push_back(' ');
  out += kBprQuestion;
  out += item_text(first);
  out += "; ";
  out += item_text(second);
  out.push_back(';');
  return out;
}

std::string bpr_output(const ItemText& positive) { return item_text(positive) + ";"; }

QaPair ie_pair(std::string_view field, std::string_view display_id,
               std::string_view answer) {
  QaPair qa;
  qa.question = "What's the ";
  qa.question += field;
  qa.question += " of ";
  qa.question += display_id;
  qa.question += "?";
  qa.answer = std::string(answer);
  return qa;
}

}  // namespace recprompt::prompts
