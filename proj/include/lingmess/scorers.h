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

// Span and pair scorers.
//
// Mention score of q = (i, j):
//   f_m(q) = m_s(x_i).v_s + m_e(x_j).v_e + m_s(x_i)^T B_m m_e(x_j)
// with m_s(x) = GeLU(W_ms x), m_e(x) = GeLU(W_me x).
//
// Antecedent score of c = (i, j) for q = (k, l), per head:
//   f_a(c, q) = a_s(x_i)^T B_ss a_s(x_k) + a_e(x_j)^T B_es a_s(x_k)
//             + a_s(x_i)^T B_se a_e(x_l) + a_e(x_j)^T B_ee a_e(x_l)
// There is one shared head and one expert head per category. The pair
// score is F(c, q) = f_m(c) + f_m(q) + f_a(c, q) + f_a^{T(c,q)}(c, q), and
// F(eps, q) = 0 for the null antecedent.

#ifndef LINGMESS_SCORERS_H_
#define LINGMESS_SCORERS_H_

#include <array>
#include <vector>

#include "lingmess/categorizer.h"
#include "lingmess/config.h"
#include "lingmess/corpus.h"
#include "lingmess/numerics.h"

namespace lingmess {

struct MentionHeadParams {
  const Tensor2 &w_start;  // h x d_enc
  const Tensor2 &w_end;    // h x d_enc
  const Tensor2 &v_start;  // h x 1
  const Tensor2 &v_end;    // h x 1
  const Tensor2 &b;        // h x h
};

struct AntecedentHeadParams {
  const Tensor2 &w_start;  // h x d_enc
  const Tensor2 &w_end;    // h x d_enc
  const Tensor2 &b_ss;     // h x h
  const Tensor2 &b_es;
  const Tensor2 &b_se;
  const Tensor2 &b_ee;
};

struct ScorerParams {
  MentionHeadParams mention;
  AntecedentHeadParams shared;
  std::vector<AntecedentHeadParams> experts;  // indexed by Index(Category)
};

// Mutable mirrors of the above, for gradient accumulation.
struct MentionHeadGrads {
  Tensor2 &w_start, &w_end, &v_start, &v_end, &b;
};
struct AntecedentHeadGrads {
  Tensor2 &w_start, &w_end, &b_ss, &b_es, &b_se, &b_ee;
};
struct ScorerGrads {
  MentionHeadGrads mention;
  AntecedentHeadGrads shared;
  std::vector<AntecedentHeadGrads> experts;
};

// Chooses the expert for a pair and which heads take part in the score.
class Router {
 public:
  Router(RoutingMode mode, const Document &doc) : mode_(mode), doc_(&doc) {}

  Category Route(const MentionPair &pair) const;
  bool shared_enabled() const { return mode_ != RoutingMode::kExpertsOnly; }
  bool experts_enabled() const { return mode_ != RoutingMode::kSharedOnly; }
  RoutingMode mode() const { return mode_; }
  const Document &doc() const { return *doc_; }

 private:
  RoutingMode mode_;
  const Document *doc_;
};

struct PairScoreBreakdown {
  bool null_antecedent = false;
  double f_m_c = 0.0;
  double f_m_q = 0.0;
  double f_a_shared = 0.0;
  // The routed expert's score (0 when experts are disabled).
  double f_a_expert = 0.0;
  // Every expert's score, so that F_t is available for any t.
  std::array<double, kNumCategories> f_a_experts{};
  Category category = Category::kOther;
  double total = 0.0;

  // f_m(c) + f_m(q) + f_a(c, q).
  double SharedTotal() const;
  // f_m(c) + f_m(q) + f_a^t(c, q).
  double ExpertTotal(Category t) const;
};

double MentionScore(const Span &span, const Tensor2 &enc,
                    const MentionHeadParams &params);
double AntecedentScore(const MentionPair &pair, const Tensor2 &enc,
                       const AntecedentHeadParams &params);
PairScoreBreakdown PairScore(const MentionPair &pair, const Tensor2 &enc,
                             const ScorerParams &params, const Router &router);
// Breakdown for (eps, q): everything zero.
PairScoreBreakdown NullPairScore();

// Scores every (candidate, query) cell by evaluating all six experts and
// selecting one with a one-hot category mask. Rows are queries, columns are
// candidates; cells where the candidate does not precede the query are -inf.
Tensor2 ScoreMatrixMasked(const std::vector<Span> &candidates,
                          const std::vector<Span> &queries, const Tensor2 &enc,
                          const ScorerParams &params, const Router &router);

// Per-document scorer that caches token projections and accumulates score
// gradients for one backward pass. Its scores are bit-identical to
// MentionScore and AntecedentScore.
class DocumentScorer {
 public:
  // Head 0 is the shared head, head 1 + Index(t) is expert t.
  static constexpr size_t kNumHeads = 1 + kNumCategories;
  static constexpr size_t kSharedHead = 0;
  static size_t ExpertHead(Category t) { return 1 + Index(t); }

  DocumentScorer(const Tensor2 &enc, const ScorerParams &params);

  double Mention(const Span &span) const;
  double Antecedent(size_t head, const MentionPair &pair) const;

  // Registers d(loss)/d(score) for a later Backward call.
  void AddMentionGrad(const Span &span, double g);
  void AddAntecedentGrad(size_t head, const MentionPair &pair, double g);

  // Pushes the registered score gradients into parameter gradients and into
  // d_enc (n x d_enc, accumulated).
  void Backward(const ScorerGrads &grads, Tensor2 &d_enc) const;

 private:
  struct Projection {
    Tensor2 pre;  // n x h
    Tensor2 act;  // n x h
  };
  struct HeadCache {
    Projection start, end;
    Tensor2 b_ss_s, b_es_s, b_se_e, b_ee_e;  // B applied to each token's rep
    // Token-pair score gradients of the four bilinear terms.
    Tensor2 g_ss, g_es, g_se, g_ee;
    bool touched = false;
  };

  static Projection Project(const Tensor2 &x, const Tensor2 &w);
  static void ProjectBackward(const Projection &p, const Tensor2 &x,
                              const Tensor2 &w, const Tensor2 &d_act,
                              Tensor2 &d_w, Tensor2 &d_x);
  const AntecedentHeadParams &HeadParams(size_t head) const;

  const Tensor2 &enc_;
  const ScorerParams &params_;
  Projection m_start_, m_end_;
  Tensor2 b_m_end_;  // B_m m_e(x_j) per token
  Tensor2 g_mention_;  // token-pair gradient of f_m
  std::vector<HeadCache> heads_;
};

}  // namespace lingmess

#endif  // LINGMESS_SCORERS_H_
