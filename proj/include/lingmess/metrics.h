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


// Coreference metrics. Every metric is a ratio of sums, so corpus scores
// aggregate numerators and denominators over documents; 0/0 counts as 0.

#ifndef LINGMESS_METRICS_H_
#define LINGMESS_METRICS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lingmess/categorizer.h"
#include "lingmess/inference.h"
#include "lingmess/model.h"

namespace lingmess {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PRF MakePRF(double precision, double recall);

struct MetricCounts {
  double p_num = 0.0, p_den = 0.0;
  double r_num = 0.0, r_den = 0.0;

  MetricCounts &operator+=(const MetricCounts &o);
  PRF ToPRF() const;
};

MetricCounts MucCounts(const Clustering &key, const Clustering &response);
MetricCounts BCubedCounts(const Clustering &key, const Clustering &response);
MetricCounts CeafPhi4Counts(const Clustering &key, const Clustering &response);
MetricCounts LeaCounts(const Clustering &key, const Clustering &response);

inline PRF Muc(const Clustering &k, const Clustering &r) { return MucCounts(k, r).ToPRF(); }
inline PRF BCubed(const Clustering &k, const Clustering &r) {
  return BCubedCounts(k, r).ToPRF();
}
inline PRF CeafPhi4(const Clustering &k, const Clustering &r) {
  return CeafPhi4Counts(k, r).ToPRF();
}
inline PRF Lea(const Clustering &k, const Clustering &r) { return LeaCounts(k, r).ToPRF(); }

// Maximum-weight assignment of rows to columns (Hungarian method). Returns
// the column of each row, or -1 for rows left unassigned when there are more
// rows than columns.
std::vector<int> MaxWeightAssignment(const std::vector<std::vector<double>> &weight);

struct PairwiseStats {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;
  PRF prf;
  size_t total() const { return tp + fp + fn + tn; }
};

struct EvalReport {
  PRF muc, b3, ceaf_phi4, lea;
  double conll_f1 = 0.0;
  std::map<Category, PairwiseStats> per_category;
};

// Documents are matched by doc_key; throws ValidationError listing the keys
// present on one side only.
EvalReport Evaluate(const std::vector<Clustering> &key,
                    const std::vector<Clustering> &response);
// Per-document CoNLL F1, in key order.
std::vector<double> PerDocConllF1(const std::vector<Clustering> &key,
                                  const std::vector<Clustering> &response);

// Over ordered pairs of gold mentions (c before q) in each document: a pair
// is predicted positive when F(c, q) > 0 and actually positive when both
// mentions share a gold cluster. Pairs are bucketed by Categorize. With
// pruned_only, pairs with a mention the model prunes are skipped.
std::map<Category, PairwiseStats> PairwiseByCategory(const std::vector<Document> &docs,
                                                     const Model &model,
                                                     bool pruned_only = false);

// Two-sided paired sign-flip test on the mean difference, with add-one
// smoothing. Needs equal-length nonempty lists and at least 1000 resamples.
double PermutationTest(const std::vector<double> &a, const std::vector<double> &b,
                       int resamples, uint64_t seed);

nlohmann::ordered_json ToJson(const PRF &prf);
nlohmann::ordered_json ToJson(const EvalReport &report);
std::string FormatTable(const EvalReport &report);

}  // namespace lingmess

#endif  // LINGMESS_METRICS_H_
