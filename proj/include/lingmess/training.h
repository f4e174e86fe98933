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

// Candidate generation and the training objective.
//
// For each pruned span q, the candidates are the pruned spans before q plus
// the null antecedent eps (score 0). Every loss term is the negated log of
// the probability mass a softmax puts on the gold antecedents of q:
//   coref    over all candidates, scored with F (shared + routed expert)
//   shared   over all candidates, scored with F_s (shared head only)
//   expert t over candidates routed to t, scored with F_t (expert t only)
// When q has no gold antecedent in a candidate set, eps is the gold one.

#ifndef LINGMESS_TRAINING_H_
#define LINGMESS_TRAINING_H_

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lingmess/categorizer.h"
#include "lingmess/config.h"
#include "lingmess/corpus.h"
#include "lingmess/model.h"
#include "lingmess/scorers.h"

namespace lingmess {

struct CandidateSet {
  Span query;
  std::vector<Span> candidates;  // eps is implicit and always present
};

struct GoldAntecedents {
  Span query;
  std::vector<Span> gold;  // subset of the candidates
  bool null_gold = false;  // eps is the (only) gold antecedent
};

// Keeps the ceil(top_lambda * num_tokens) best-scoring spans, ties broken by
// (start, end), and returns them in document order.
std::vector<Span> PruneByScores(const std::vector<Span> &spans,
                                std::span<const double> scores,
                                size_t num_tokens, double top_lambda);
std::vector<Span> PruneMentions(const Document &doc, const Tensor2 &enc,
                                const MentionHeadParams &mention,
                                const TrainConfig &cfg);

std::vector<CandidateSet> CandidateSets(const std::vector<Span> &pruned);

// Candidates routed to category t (eps kept).
CandidateSet RestrictedCandidates(const CandidateSet &cs, Category t,
                                  const Router &router);
CandidateSet RestrictedCandidates(const CandidateSet &cs, Category t,
                                  const Document &doc);

// Candidates sharing a gold cluster with the query, or eps.
GoldAntecedents GoldFor(const CandidateSet &cs, const Document &doc);
// gold restricted to the candidates of cs, or eps if none remain.
GoldAntecedents RestrictGold(const GoldAntecedents &gold, const CandidateSet &cs);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d(loss)/d(score) per candidate (eps excluded)
};

// scores[i] scores cs.candidates[i]; eps scores 0. Throws
// std::invalid_argument when a gold antecedent is not a candidate or the
// gold set is empty.
LossResult CorefLoss(const CandidateSet &cs, const GoldAntecedents &gold,
                     std::span<const double> scores);
LossResult ExpertLoss(const CandidateSet &restricted, const GoldAntecedents &gold,
                      std::span<const double> scores);
LossResult SharedLoss(const CandidateSet &cs, const GoldAntecedents &gold,
                      std::span<const double> scores);

struct LossBreakdown {
  double total = 0.0;
  double coref = 0.0;
  double shared = 0.0;
  std::array<double, kNumCategories> experts{};
  size_t num_queries = 0;
};

// Loss of one document. With grads set, also accumulates d(total)/d(param)
// into it (a buffer from ParamStore::ZeroGradsLike). The mode comes from
// cfg; the model's own config is not consulted. A non-null `pruned`
// replaces mention pruning with a fixed span list (document order), which
// keeps the loss smooth for finite-difference checks.
LossBreakdown TotalLoss(const Document &doc, const Model &model,
                        const TrainConfig &cfg,
                        std::vector<Tensor2> *grads = nullptr,
                        const std::vector<Span> *pruned = nullptr);

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean per-document loss over the epoch
  double wall_seconds = 0.0;
};

struct TrainOptions {
  // Worker threads for per-document forward/backward; 0 or 1 is serial.
  int threads = 0;
  std::function<void(const EpochLog &)> on_epoch;
};

// Consecutive documents grouped while their token total stays within the
// budget; a document larger than the budget gets a batch of its own.
std::vector<std::vector<size_t>> MakeBatches(const std::vector<Document> &docs,
                                             size_t token_budget);

// Adam over batches in document order. Results do not depend on the thread
// count.
std::vector<EpochLog> TrainModel(Model &model, const std::vector<Document> &docs,
                                 const TrainConfig &cfg,
                                 const TrainOptions &options = {});

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
};

// Builds the vocabulary, initializes from cfg.seed and trains.
TrainResult Train(const std::vector<Document> &docs, const TrainConfig &cfg,
                  const TrainOptions &options = {});

// Reads LINGMESS_THREADS (unset or 0 means serial).
int ThreadsFromEnv();

}  // namespace lingmess

#endif  // LINGMESS_TRAINING_H_
