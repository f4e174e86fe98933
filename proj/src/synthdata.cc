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


#include "lingmess/synthdata.h"

#include <map>
#include <set>
#include <sstream>

#include "lingmess/numerics.h"

namespace lingmess {

namespace {

// Template syntax: "|" ends a sentence, "[X" opens a mention of cluster X,
// "]" closes the innermost open mention. M<k>.f / M<k>.l are the first and
// last name of the episode's k-th man, F<k>.f / F<k>.l of its k-th woman.
constexpr const char *kTemplates[] = {
    "[A M1.f M1.l ] met [B F1.f F1.l ] . | [A He ] thanked [B her ] . | "
    "[A M1.l ] smiled at [B her ] .",
    "[A M1.f M1.l ] called [B M2.f M2.l ] . | \" [A I ] am here , \" [A he ] "
    "told [B him ] . | [B He ] nodded .",
    "[A F1.f F1.l ] lost [B [A her ] keys ] . | [A She ] found [B them ] later . | "
    "[B They ] were old . | [A F1.f F1.l ] laughed .",
    "[A M1.f M1.l ] sold [B the car ] . | [B The car ] was old , [A he ] said . | "
    "[A He ] washed [B it ] .",
    "[A F1.f F1.l ] bought [B the car ] . | [B It ] was new to [A her ] . | "
    "[A She ] loved [B it ] .",
    "[A M1.f M1.l ] joined [B the bank ] . | [C Bank staff ] welcomed [A him ] . | "
    "[C They ] liked [B the bank ] .",
    "[A M1.f M1.l ] leads [B the team ] . | [A The coach ] is proud of [B it ] . | "
    "[B The team ] loves [A him ] .",
};
constexpr size_t kNumTemplates = std::size(kTemplates);
// Templates that repeat a name inside the episode.
constexpr size_t kAmbiguousTemplates[] = {0, 2};

struct Lexicon {
  std::vector<std::string> male, female, last;
};

const Lexicon &Names(bool heldout) {
  static const Lexicon train{
      {"John", "Paul", "Mark", "Tom", "Luke", "Adam", "Ben", "Carl", "David", "Eric",
       "Frank", "Greg", "Henry", "Ivan", "Jack", "Kevin"},
      {"Anna", "Mary", "Lucy", "Emma", "Sara", "Julia", "Kate", "Nina", "Olga",
       "Rita", "Tina", "Vera"},
      {"Smith", "Brown", "Clark", "Davis", "Evans", "Fisher", "Green", "Hall",
       "Irwin", "Jones", "King", "Lewis", "Moore", "Nash", "Owen", "Price", "Quinn",
       "Reed", "Scott", "Turner", "Usher", "Vance", "Walsh", "Young"}};
  static const Lexicon heldout_lex{
      {"Arthur", "Boris", "Cedric", "Dmitri", "Edgar", "Felix", "Gustav", "Hugo",
       "Igor", "Jasper", "Klaus", "Lionel", "Milo", "Nestor", "Oscar", "Pedro"},
      {"Alma", "Beatrix", "Clara", "Dora", "Edith", "Flora", "Greta", "Hilda", "Ines",
       "Juno", "Leila", "Mona"},
      {"Abbott", "Baxter", "Carver", "Dalton", "Ellison", "Fenwick", "Garner",
       "Hargrove", "Ingram", "Jarvis", "Kendall", "Lockwood", "Mercer", "Norwood",
       "Oakley", "Pembroke", "Radcliffe", "Sinclair", "Thornton", "Underwood",
       "Vaughn", "Whitaker", "Yardley", "Zeller"}};
  return heldout ? heldout_lex : train;
}

// Draws names without replacement within one document.
class NamePool {
 public:
  NamePool(const Lexicon &lex, SplitMix64 &rng) : lex_(lex), rng_(rng) {}

  std::string Draw(const std::vector<std::string> &from, std::set<std::string> &used) {
    if (used.size() >= from.size()) throw SynthError("synth: name lexicon exhausted");
    for (;;) {
      const auto &name = from[rng_.Below(from.size())];
      if (used.insert(name).second) return name;
    }
  }
  std::pair<std::string, std::string> Person(bool male) {
    auto first = Draw(male ? lex_.male : lex_.female, male ? used_male_ : used_female_);
    return {first, Draw(lex_.last, used_last_)};
  }

 private:
  const Lexicon &lex_;
  SplitMix64 &rng_;
  std::set<std::string> used_male_, used_female_, used_last_;
};

struct Builder {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::vector<Span>> clusters;
  size_t offset = 0;

  void AddEpisode(const std::string &tmpl, NamePool &names) {
    std::map<std::string, std::pair<std::string, std::string>> people;
    std::map<char, size_t> cluster_ids;
    std::vector<std::pair<char, size_t>> open;  // cluster letter, start token
    std::vector<std::string> sentence;
    std::istringstream in(tmpl);
    std::string piece;
    while (in >> piece) {
      if (piece == "|") {
        sentences.push_back(std::move(sentence));
        sentence.clear();
      } else if (piece[0] == '[' && piece.size() == 2) {
        open.emplace_back(piece[1], offset);
      } else if (piece == "]") {
        const auto [letter, start] = open.back();
        open.pop_back();
        auto [it, fresh] = cluster_ids.emplace(letter, clusters.size());
        if (fresh) clusters.emplace_back();
        clusters[it->second].push_back({start, offset - 1});
      } else {
        if (piece.size() == 4 && (piece[0] == 'M' || piece[0] == 'F') && piece[2] == '.') {
          const std::string who = piece.substr(0, 2);
          auto p = people.find(who);
          if (p == people.end()) p = people.emplace(who, names.Person(piece[0] == 'M')).first;
          piece = piece[3] == 'f' ? p->second.first : p->second.second;
        }
        sentence.push_back(piece);
        ++offset;
      }
    }
    if (!open.empty()) throw SynthError("synth: unbalanced template");
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
  }
};

void CheckCoverage(const Document &doc) {
  const auto counts = CategoryCoverage({doc});
  for (Category t : kAllCategories) {
    const auto &c = counts[Index(t)];
    if (c.positive == 0 || c.negative == 0) {
      throw SynthError("synth: document " + doc.doc_key + " lacks " +
                       (c.positive == 0 ? "positive" : "negative") + " " +
                       std::string(CategoryName(t)) + " pairs");
    }
  }
}

}  // namespace

std::array<PairCounts, kNumCategories> CategoryCoverage(const std::vector<Document> &docs) {
  std::array<PairCounts, kNumCategories> out{};
  for (const auto &doc : docs) {
    std::vector<std::pair<Span, size_t>> mentions;
    for (size_t k = 0; k < doc.gold_clusters.size(); ++k) {
      for (const auto &s : doc.gold_clusters[k]) mentions.emplace_back(s, k);
    }
    std::sort(mentions.begin(), mentions.end());
    for (size_t q = 0; q < mentions.size(); ++q) {
      for (size_t c = 0; c < q; ++c) {
        const Category t = Categorize({mentions[c].first, mentions[q].first}, doc);
        auto &cell = out[Index(t)];
        (mentions[c].second == mentions[q].second ? cell.positive : cell.negative)++;
      }
    }
  }
  return out;
}

std::vector<Document> Generate(const SynthSpec &spec) {
  if (spec.n_docs < 1) throw SynthError("synth: n_docs must be positive");
  if (spec.ambiguous_episodes < 0) {
    throw SynthError("synth: ambiguous_episodes must be non-negative");
  }
  SplitMix64 rng(spec.seed);
  const Lexicon &lex = Names(spec.heldout_names);
  std::vector<Document> docs;
  for (int d = 0; d < spec.n_docs; ++d) {
    std::vector<size_t> episodes(kNumTemplates);
    for (size_t i = 0; i < kNumTemplates; ++i) episodes[i] = i;
    for (int k = 0; k < spec.ambiguous_episodes; ++k) {
      episodes.push_back(kAmbiguousTemplates[rng.Below(std::size(kAmbiguousTemplates))]);
    }
    for (size_t i = episodes.size(); i > 1; --i) {
      std::swap(episodes[i - 1], episodes[rng.Below(i)]);
    }
    NamePool names(lex, rng);
    Builder b;
    for (size_t e : episodes) b.AddEpisode(kTemplates[e], names);
    std::ostringstream key;
    key << (spec.heldout_names ? "synth_heldout_" : "synth_") << d;
    Document doc;
    try {
      doc = MakeDocument(key.str(), b.sentences, std::move(b.clusters));
    } catch (const ValidationError &e) {
      throw SynthError(std::string("synth: template produced an invalid document: ") +
                       e.what());
    }
    CheckCoverage(doc);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace lingmess
