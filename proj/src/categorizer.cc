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

#include "lingmess/categorizer.h"

#include <algorithm>
#include <stdexcept>

namespace lingmess {

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kPronPronC: return "PronPronC";
    case Category::kPronPronNC: return "PronPronNC";
    case Category::kEntPron: return "EntPron";
    case Category::kMatch: return "Match";
    case Category::kContains: return "Contains";
    case Category::kOther: return "Other";
  }
  return "?";
}

std::string_view CategorySlug(Category c) {
  switch (c) {
    case Category::kPronPronC: return "pron_pron_c";
    case Category::kPronPronNC: return "pron_pron_nc";
    case Category::kEntPron: return "ent_pron";
    case Category::kMatch: return "match";
    case Category::kContains: return "contains";
    case Category::kOther: return "other";
  }
  return "?";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (Category c : kAllCategories) {
    if (name == CategoryName(c) || name == CategorySlug(c)) return c;
  }
  return std::nullopt;
}

const std::map<std::string, int> &PronounTable() {
  static const auto *table = new std::map<std::string, int>{
      {"i", 1},        {"me", 1},         {"my", 1},
      {"mine", 1},     {"myself", 1},     {"you", 2},
      {"your", 2},     {"yours", 2},      {"yourself", 2},
      {"yourselves", 2}, {"he", 3},       {"him", 3},
      {"his", 3},      {"himself", 3},    {"she", 4},
      {"her", 4},      {"hers", 4},       {"herself", 4},
      {"it", 5},       {"its", 5},        {"itself", 5},
      {"we", 6},       {"us", 6},         {"our", 6},
      {"ours", 6},     {"ourselves", 6},  {"they", 7},
      {"them", 7},     {"their", 7},      {"themselves", 7},
      {"that", 8},     {"this", 8},
  };
  return *table;
}

const std::set<std::string> &StopWords() {
  static const auto *words = new std::set<std::string>{
      "'s", "a",  "all", "an", "and", "at",   "for",   "from",  "in",
      "into", "more", "of", "on", "or", "some", "the", "these", "those",
  };
  return *words;
}

std::string Lowercase(std::string_view s) {
  std::string out(s);
  for (char &ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

namespace {

std::optional<int> PronounGroup(std::string_view word) {
  const auto &table = PronounTable();
  auto it = table.find(Lowercase(word));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> ContentWords(const std::vector<std::string> &words) {
  std::set<std::string> out;
  for (const auto &w : words) {
    std::string lower = Lowercase(w);
    if (StopWords().count(lower) == 0) out.insert(std::move(lower));
  }
  return out;
}

std::optional<int> SpanPronounGroup(const std::vector<std::string> &words) {
  if (words.size() != 1) return std::nullopt;
  return PronounGroup(words[0]);
}

// Low byte of the last UTF-8 code point of s.
unsigned LastCodePointByte(std::string_view s) {
  if (s.empty()) return 0;
  size_t i = s.size() - 1;
  while (i > 0 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) --i;
  const auto lead = static_cast<unsigned char>(s[i]);
  uint32_t cp;
  size_t extra;
  if (lead < 0x80) {
    cp = lead;
    extra = 0;
  } else if ((lead & 0xE0) == 0xC0) {
    cp = lead & 0x1F;
    extra = 1;
  } else if ((lead & 0xF0) == 0xE0) {
    cp = lead & 0x0F;
    extra = 2;
  } else {
    cp = lead & 0x07;
    extra = 3;
  }
  for (size_t k = 1; k <= extra && i + k < s.size(); ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  }
  return cp & 0xFF;
}

}  // namespace

bool IsPronoun(const Span &span, const Document &doc) {
  return span.start == span.end && span.end < doc.size() &&
         PronounGroup(doc.tokens[span.start].text).has_value();
}

bool PronounsCompatible(std::string_view a, std::string_view b) {
  const auto ga = PronounGroup(a);
  const auto gb = PronounGroup(b);
  if (!ga || !gb) {
    throw std::invalid_argument("PronounsCompatible: not a pronoun: " +
                                std::string(ga ? b : a));
  }
  return *ga == *gb;
}

std::set<std::string> ContentWords(const Span &span, const Document &doc) {
  return ContentWords(doc.Words(span));
}

Category Categorize(const std::vector<std::string> &candidate,
                    const std::vector<std::string> &query) {
  const auto gc = SpanPronounGroup(candidate);
  const auto gq = SpanPronounGroup(query);
  if (gc && gq) return *gc == *gq ? Category::kPronPronC : Category::kPronPronNC;
  if (gc || gq) return Category::kEntPron;

  const auto wc = ContentWords(candidate);
  const auto wq = ContentWords(query);
  // No lexical evidence on either side: never Match or Contains.
  if (wc.empty() || wq.empty()) return Category::kOther;
  if (wc == wq) return Category::kMatch;
  if (std::includes(wc.begin(), wc.end(), wq.begin(), wq.end()) ||
      std::includes(wq.begin(), wq.end(), wc.begin(), wc.end())) {
    return Category::kContains;
  }
  return Category::kOther;
}

Category Categorize(const MentionPair &pair, const Document &doc) {
  return Categorize(doc.Words(pair.candidate), doc.Words(pair.query));
}

Category CategorizeRandom(std::string_view candidate_last_token,
                          std::string_view query_last_token) {
  const unsigned sum =
      LastCodePointByte(candidate_last_token) + LastCodePointByte(query_last_token);
  return kAllCategories[sum % kNumCategories];
}

Category CategorizeRandom(const MentionPair &pair, const Document &doc) {
  return CategorizeRandom(doc.tokens[pair.candidate.end].text,
                          doc.tokens[pair.query.end].text);
}

}  // namespace lingmess
