// Copyright 2026 The LingMess-cpp Authors.
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

// Rule-based routing of mention pairs into six categories.
//
// Pronoun pairs split on agreement (same pronoun group or not), a pronoun
// paired with any other span is EntPron, and the rest is decided on content
// words (lowercased tokens minus a fixed stop list): equal sets are Match, a
// strict subset in either direction is Contains, anything else is Other.

#ifndef LINGMESS_CATEGORIZER_H_
#define LINGMESS_CATEGORIZER_H_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "lingmess/corpus.h"

namespace lingmess {

enum class Category {
  kPronPronC = 0,
  kPronPronNC = 1,
  kEntPron = 2,
  kMatch = 3,
  kContains = 4,
  kOther = 5,
};

inline constexpr size_t kNumCategories = 6;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kPronPronC, Category::kPronPronNC, Category::kEntPron,
    Category::kMatch,     Category::kContains,   Category::kOther};

inline size_t Index(Category c) { return static_cast<size_t>(c); }

// "PronPronC", "PronPronNC", "EntPron", "Match", "Contains", "Other".
std::string_view CategoryName(Category c);
// Snake-case form used for parameter names: "pron_pron_c", ...
std::string_view CategorySlug(Category c);
std::optional<Category> ParseCategory(std::string_view name);

// Lowercase pronoun -> agreement group id (1..8).
const std::map<std::string, int> &PronounTable();
const std::set<std::string> &StopWords();

// ASCII lowercasing; bytes >= 0x80 are left untouched.
std::string Lowercase(std::string_view s);

bool IsPronoun(const Span &span, const Document &doc);
// Both arguments must be pronouns (any case); throws std::invalid_argument
// otherwise.
bool PronounsCompatible(std::string_view a, std::string_view b);
std::set<std::string> ContentWords(const Span &span, const Document &doc);

Category Categorize(const MentionPair &pair, const Document &doc);
// Word-list form of Categorize, for callers without a document.
Category Categorize(const std::vector<std::string> &candidate,
                    const std::vector<std::string> &query);

// Pseudo-random routing for the ablation: (last byte of c + last byte of q)
// mod 6, where "last byte" is the low byte of the last code point of the
// span's last token.
Category CategorizeRandom(const MentionPair &pair, const Document &doc);
Category CategorizeRandom(std::string_view candidate_last_token,
                          std::string_view query_last_token);

}  // namespace lingmess

#endif  // LINGMESS_CATEGORIZER_H_
