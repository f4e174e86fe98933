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


// Synthetic coreference corpus built from short episode templates (a few
// sentences each) filled with names from a fixed lexicon. Every cluster has
// at least two mentions and every document has a positive and a negative
// gold pair in each category.

#ifndef LINGMESS_SYNTHDATA_H_
#define LINGMESS_SYNTHDATA_H_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lingmess/categorizer.h"
#include "lingmess/corpus.h"

namespace lingmess {

struct SynthSpec {
  int n_docs = 20;
  uint64_t seed = 0;
  // Draw names from a second lexicon that shares no name with the default
  // one, for held-out evaluation.
  bool heldout_names = false;
  // Extra episodes per document that repeat the name-matching templates with
  // new people, so that only the names tell the chains apart.
  int ambiguous_episodes = 0;
};

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Document> Generate(const SynthSpec &spec);

struct PairCounts {
  size_t positive = 0;
  size_t negative = 0;
};

// Gold-pair counts (c before q, both gold mentions) per category.
std::array<PairCounts, kNumCategories> CategoryCoverage(const std::vector<Document> &docs);

}  // namespace lingmess

#endif  // LINGMESS_SYNTHDATA_H_
