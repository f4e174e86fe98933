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


// Antecedent linking and chain formation.

#ifndef LINGMESS_INFERENCE_H_
#define LINGMESS_INFERENCE_H_

#include <optional>
#include <string>
#include <vector>

#include "lingmess/corpus.h"
#include "lingmess/model.h"
#include "lingmess/numerics.h"

namespace lingmess {

struct Clustering {
  std::string doc_key;
  std::vector<std::vector<Span>> clusters;
  bool operator==(const Clustering &) const = default;
};

struct Link {
  Span query;
  std::optional<Span> antecedent;  // nullopt is eps
  bool operator==(const Link &) const = default;
};

// totals(q, c) scores pruned[c] as the antecedent of pruned[q]; eps scores 0.
// A candidate wins only with a score strictly above eps and above every
// earlier candidate.
std::vector<Link> LinkAntecedents(const std::vector<Span> &pruned,
                                  const Tensor2 &totals);

// Connected components of the links, singletons dropped, mentions sorted and
// clusters ordered by their first mention.
Clustering BuildClusters(const std::string &doc_key, const std::vector<Link> &links);

// Gold clusters in the same normal form (singleton clusters dropped).
Clustering GoldClustering(const Document &doc);

// Mentions pruned and scored under the model's own config.
Clustering Predict(const Document &doc, const Model &model);
std::vector<Clustering> PredictAll(const std::vector<Document> &docs,
                                   const Model &model, int threads = 0);

// The document with its clusters replaced by the prediction.
Document WithClusters(const Document &doc, const Clustering &clustering);

}  // namespace lingmess

#endif  // LINGMESS_INFERENCE_H_
