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

#include "lingmess/scorers.h"

#include <limits>
#include <stdexcept>

namespace lingmess {

namespace {

// GeLU(W x) for a single token vector.
std::vector<double> ProjectToken(const Tensor2 &w, std::span<const double> x) {
  std::vector<double> out(w.rows());
  for (size_t r = 0; r < w.rows(); ++r) out[r] = Gelu(Dot(w.row(r), x));
  return out;
}

void CheckSpan(const Span &span, const Tensor2 &enc) {
  if (span.start > span.end || span.end >= enc.rows()) {
    throw std::invalid_argument("span " + ToString(span) + " out of bounds");
  }
}

}  // namespace

Category Router::Route(const MentionPair &pair) const {
  if (mode_ == RoutingMode::kRandom) return CategorizeRandom(pair, *doc_);
  return Categorize(pair, *doc_);
}

double PairScoreBreakdown::SharedTotal() const {
  if (null_antecedent) return 0.0;
  return (f_m_c + f_m_q) + f_a_shared;
}

double PairScoreBreakdown::ExpertTotal(Category t) const {
  if (null_antecedent) return 0.0;
  return (f_m_c + f_m_q) + f_a_experts[Index(t)];
}

double MentionScore(const Span &span, const Tensor2 &enc,
                    const MentionHeadParams &params) {
  CheckSpan(span, enc);
  const auto ms = ProjectToken(params.w_start, enc.row(span.start));
  const auto me = ProjectToken(params.w_end, enc.row(span.end));
  return (Dot(ms, params.v_start.data()) + Dot(me, params.v_end.data())) +
         Bilinear(ms, params.b, me);
}

double AntecedentScore(const MentionPair &pair, const Tensor2 &enc,
                       const AntecedentHeadParams &params) {
  CheckSpan(pair.candidate, enc);
  CheckSpan(pair.query, enc);
  const auto cs = ProjectToken(params.w_start, enc.row(pair.candidate.start));
  const auto ce = ProjectToken(params.w_end, enc.row(pair.candidate.end));
  const auto qs = ProjectToken(params.w_start, enc.row(pair.query.start));
  const auto qe = ProjectToken(params.w_end, enc.row(pair.query.end));
  return ((Bilinear(cs, params.b_ss, qs) + Bilinear(ce, params.b_es, qs)) +
          Bilinear(cs, params.b_se, qe)) +
         Bilinear(ce, params.b_ee, qe);
}

PairScoreBreakdown NullPairScore() {
  PairScoreBreakdown b;
  b.null_antecedent = true;
  return b;
}

PairScoreBreakdown PairScore(const MentionPair &pair, const Tensor2 &enc,
                             const ScorerParams &params, const Router &router) {
  PairScoreBreakdown b;
  b.category = router.Route(pair);
  b.f_m_c = MentionScore(pair.candidate, enc, params.mention);
  b.f_m_q = MentionScore(pair.query, enc, params.mention);
  double total = b.f_m_c + b.f_m_q;
  if (router.shared_enabled()) {
    b.f_a_shared = AntecedentScore(pair, enc, params.shared);
    total += b.f_a_shared;
  }
  if (router.experts_enabled()) {
    for (Category t : kAllCategories) {
      b.f_a_experts[Index(t)] = AntecedentScore(pair, enc, params.experts[Index(t)]);
    }
    b.f_a_expert = b.f_a_experts[Index(b.category)];
    total += b.f_a_expert;
  }
  b.total = total;
  return b;
}

Tensor2 ScoreMatrixMasked(const std::vector<Span> &candidates,
                          const std::vector<Span> &queries, const Tensor2 &enc,
                          const ScorerParams &params, const Router &router) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  DocumentScorer scorer(enc, params);
  Tensor2 out(queries.size(), candidates.size(), kNegInf);
  std::vector<double> cand_mention(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) {
    cand_mention[c] = scorer.Mention(candidates[c]);
  }
  std::array<double, kNumCategories> expert{};
  std::array<double, kNumCategories> mask{};
  for (size_t q = 0; q < queries.size(); ++q) {
    const double fq = scorer.Mention(queries[q]);
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (!Precedes(candidates[c], queries[q])) continue;
      const MentionPair pair{candidates[c], queries[q]};
      double total = cand_mention[c] + fq;
      if (router.shared_enabled()) {
        total += scorer.Antecedent(DocumentScorer::kSharedHead, pair);
      }
      if (router.experts_enabled()) {
        for (Category t : kAllCategories) {
          expert[Index(t)] = scorer.Antecedent(DocumentScorer::ExpertHead(t), pair);
          mask[Index(t)] = 0.0;
        }
        mask[Index(router.Route(pair))] = 1.0;
        total += Dot(mask, expert);
      }
      out(q, c) = total;
    }
  }
  return out;
}

DocumentScorer::Projection DocumentScorer::Project(const Tensor2 &x,
                                                   const Tensor2 &w) {
  Projection p{Tensor2(x.rows(), w.rows()), Tensor2(x.rows(), w.rows())};
  for (size_t i = 0; i < x.rows(); ++i) {
    for (size_t r = 0; r < w.rows(); ++r) {
      const double z = Dot(w.row(r), x.row(i));
      p.pre(i, r) = z;
      p.act(i, r) = Gelu(z);
    }
  }
  return p;
}

void DocumentScorer::ProjectBackward(const Projection &p, const Tensor2 &x,
                                     const Tensor2 &w, const Tensor2 &d_act,
                                     Tensor2 &d_w, Tensor2 &d_x) {
  std::vector<double> d_pre(w.rows());
  for (size_t i = 0; i < x.rows(); ++i) {
    bool any = false;
    for (size_t r = 0; r < w.rows(); ++r) {
      d_pre[r] = d_act(i, r) * GeluGrad(p.pre(i, r));
      any = any || d_pre[r] != 0.0;
    }
    if (!any) continue;
    auto xi = x.row(i);
    for (size_t r = 0; r < w.rows(); ++r) {
      if (d_pre[r] == 0.0) continue;
      auto gw = d_w.row(r);
      for (size_t c = 0; c < xi.size(); ++c) gw[c] += d_pre[r] * xi[c];
    }
    MatTVecAdd(w, d_pre, d_x.row(i));
  }
}

DocumentScorer::DocumentScorer(const Tensor2 &enc, const ScorerParams &params)
    : enc_(enc), params_(params) {
  if (params.experts.size() != kNumCategories) {
    throw std::invalid_argument("DocumentScorer: need one head per category");
  }
  const size_t n = enc.rows();
  m_start_ = Project(enc, params.mention.w_start);
  m_end_ = Project(enc, params.mention.w_end);
  const size_t h = params.mention.b.rows();
  b_m_end_ = Tensor2(n, h);
  for (size_t i = 0; i < n; ++i) MatVec(params.mention.b, m_end_.act.row(i), b_m_end_.row(i));
  g_mention_ = Tensor2(n, n);

  heads_.resize(kNumHeads);
  for (size_t head = 0; head < kNumHeads; ++head) {
    const auto &hp = HeadParams(head);
    auto &cache = heads_[head];
    cache.start = Project(enc, hp.w_start);
    cache.end = Project(enc, hp.w_end);
    const size_t ha = hp.b_ss.rows();
    cache.b_ss_s = Tensor2(n, ha);
    cache.b_es_s = Tensor2(n, ha);
    cache.b_se_e = Tensor2(n, ha);
    cache.b_ee_e = Tensor2(n, ha);
    for (size_t i = 0; i < n; ++i) {
      MatVec(hp.b_ss, cache.start.act.row(i), cache.b_ss_s.row(i));
      MatVec(hp.b_es, cache.start.act.row(i), cache.b_es_s.row(i));
      MatVec(hp.b_se, cache.end.act.row(i), cache.b_se_e.row(i));
      MatVec(hp.b_ee, cache.end.act.row(i), cache.b_ee_e.row(i));
    }
  }
}

const AntecedentHeadParams &DocumentScorer::HeadParams(size_t head) const {
  return head == kSharedHead ? params_.shared : params_.experts[head - 1];
}

double DocumentScorer::Mention(const Span &span) const {
  CheckSpan(span, enc_);
  auto ms = m_start_.act.row(span.start);
  auto me = m_end_.act.row(span.end);
  return (Dot(ms, params_.mention.v_start.data()) +
          Dot(me, params_.mention.v_end.data())) +
         Dot(ms, b_m_end_.row(span.end));
}

double DocumentScorer::Antecedent(size_t head, const MentionPair &pair) const {
  const auto &h = heads_.at(head);
  const size_t i = pair.candidate.start, j = pair.candidate.end;
  const size_t k = pair.query.start, l = pair.query.end;
  auto cs = h.start.act.row(i);
  auto ce = h.end.act.row(j);
  return ((Dot(cs, h.b_ss_s.row(k)) + Dot(ce, h.b_es_s.row(k))) +
          Dot(cs, h.b_se_e.row(l))) +
         Dot(ce, h.b_ee_e.row(l));
}

void DocumentScorer::AddMentionGrad(const Span &span, double g) {
  g_mention_(span.start, span.end) += g;
}

void DocumentScorer::AddAntecedentGrad(size_t head, const MentionPair &pair,
                                       double g) {
  auto &h = heads_.at(head);
  if (!h.touched) {
    const size_t n = enc_.rows();
    h.g_ss = Tensor2(n, n);
    h.g_es = Tensor2(n, n);
    h.g_se = Tensor2(n, n);
    h.g_ee = Tensor2(n, n);
    h.touched = true;
  }
  const size_t i = pair.candidate.start, j = pair.candidate.end;
  const size_t k = pair.query.start, l = pair.query.end;
  h.g_ss(i, k) += g;
  h.g_es(j, k) += g;
  h.g_se(i, l) += g;
  h.g_ee(j, l) += g;
}

namespace {

// For score terms s = Σ_{a,b} G[a][b] u_a^T B v_b, accumulates
//   dB += Σ G[a][b] u_a v_b^T, du_a += Σ_b G[a][b] (B v_b),
//   dv_b += Σ_a G[a][b] (B^T u_a).
void BilinearTermBackward(const Tensor2 &g, const Tensor2 &u, const Tensor2 &v,
                          const Tensor2 &b, const Tensor2 &b_v, Tensor2 &d_b,
                          Tensor2 &d_u, Tensor2 &d_v) {
  const size_t n = g.rows();
  const size_t h = b.rows();
  std::vector<double> t(b.cols());
  for (size_t a = 0; a < n; ++a) {
    std::fill(t.begin(), t.end(), 0.0);
    bool any = false;
    auto du = d_u.row(a);
    for (size_t c = 0; c < n; ++c) {
      const double w = g(a, c);
      if (w == 0.0) continue;
      any = true;
      auto vc = v.row(c);
      auto bvc = b_v.row(c);
      for (size_t k = 0; k < t.size(); ++k) t[k] += w * vc[k];
      for (size_t k = 0; k < h; ++k) du[k] += w * bvc[k];
    }
    if (!any) continue;
    auto ua = u.row(a);
    for (size_t r = 0; r < h; ++r) {
      if (ua[r] == 0.0) continue;
      auto db = d_b.row(r);
      for (size_t k = 0; k < t.size(); ++k) db[k] += ua[r] * t[k];
    }
  }
  // dv_b += B^T (Σ_a G[a][b] u_a)
  std::vector<double> s(h);
  for (size_t c = 0; c < n; ++c) {
    std::fill(s.begin(), s.end(), 0.0);
    bool any = false;
    for (size_t a = 0; a < n; ++a) {
      const double w = g(a, c);
      if (w == 0.0) continue;
      any = true;
      auto ua = u.row(a);
      for (size_t k = 0; k < h; ++k) s[k] += w * ua[k];
    }
    if (any) MatTVecAdd(b, s, d_v.row(c));
  }
}

}  // namespace

void DocumentScorer::Backward(const ScorerGrads &grads, Tensor2 &d_enc) const {
  const size_t n = enc_.rows();
  const auto &mp = params_.mention;
  const size_t h = mp.b.rows();

  // Mention head.
  {
    Tensor2 d_ms(n, h), d_me(n, h);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        const double g = g_mention_(i, j);
        if (g == 0.0) continue;
        auto ms = m_start_.act.row(i);
        auto me = m_end_.act.row(j);
        for (size_t k = 0; k < h; ++k) {
          grads.mention.v_start(k, 0) += g * ms[k];
          grads.mention.v_end(k, 0) += g * me[k];
          d_ms(i, k) += g * mp.v_start(k, 0);
          d_me(j, k) += g * mp.v_end(k, 0);
        }
      }
    }
    BilinearTermBackward(g_mention_, m_start_.act, m_end_.act, mp.b, b_m_end_,
                         grads.mention.b, d_ms, d_me);
    ProjectBackward(m_start_, enc_, mp.w_start, d_ms, grads.mention.w_start, d_enc);
    ProjectBackward(m_end_, enc_, mp.w_end, d_me, grads.mention.w_end, d_enc);
  }

  for (size_t head = 0; head < kNumHeads; ++head) {
    const auto &cache = heads_[head];
    if (!cache.touched) continue;
    const auto &hp = HeadParams(head);
    const auto &hg = head == kSharedHead ? grads.shared : grads.experts[head - 1];
    const size_t ha = hp.b_ss.rows();
    Tensor2 d_s(n, ha), d_e(n, ha);
    BilinearTermBackward(cache.g_ss, cache.start.act, cache.start.act, hp.b_ss,
                         cache.b_ss_s, hg.b_ss, d_s, d_s);
    BilinearTermBackward(cache.g_es, cache.end.act, cache.start.act, hp.b_es,
                         cache.b_es_s, hg.b_es, d_e, d_s);
    BilinearTermBackward(cache.g_se, cache.start.act, cache.end.act, hp.b_se,
                         cache.b_se_e, hg.b_se, d_s, d_e);
    BilinearTermBackward(cache.g_ee, cache.end.act, cache.end.act, hp.b_ee,
                         cache.b_ee_e, hg.b_ee, d_e, d_e);
    ProjectBackward(cache.start, enc_, hp.w_start, d_s, hg.w_start, d_enc);
    ProjectBackward(cache.end, enc_, hp.w_end, d_e, hg.w_end, d_enc);
  }
}

}  // namespace lingmess
