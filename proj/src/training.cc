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

#include "lingmess/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>

#include "lingmess/encoder.h"
#include "parallel.h"

namespace lingmess {

std::vector<Span> PruneByScores(const std::vector<Span> &spans,
                                std::span<const double> scores,
                                size_t num_tokens, double top_lambda) {
  if (spans.size() != scores.size()) {
    throw std::invalid_argument("PruneByScores: spans/scores length mismatch");
  }
  if (!(top_lambda > 0.0 && top_lambda <= 1.0)) {
    throw std::invalid_argument("PruneByScores: top_lambda must be in (0,1]");
  }
  const auto keep = std::min<size_t>(
      spans.size(),
      static_cast<size_t>(std::ceil(top_lambda * static_cast<double>(num_tokens))));
  std::vector<size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return spans[a] < spans[b];
  });
  order.resize(keep);
  std::vector<Span> kept;
  kept.reserve(keep);
  for (size_t i : order) kept.push_back(spans[i]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<Span> PruneMentions(const Document &doc, const Tensor2 &enc,
                                const MentionHeadParams &mention,
                                const TrainConfig &cfg) {
  const auto spans = EnumerateSpans(doc, cfg.max_span_width);
  std::vector<double> scores(spans.size());
  for (size_t i = 0; i < spans.size(); ++i) {
    scores[i] = MentionScore(spans[i], enc, mention);
  }
  return PruneByScores(spans, scores, doc.size(), cfg.top_lambda);
}

std::vector<CandidateSet> CandidateSets(const std::vector<Span> &pruned) {
  std::vector<CandidateSet> sets;
  sets.reserve(pruned.size());
  for (size_t q = 0; q < pruned.size(); ++q) {
    CandidateSet cs{pruned[q], {}};
    for (size_t c = 0; c < pruned.size(); ++c) {
      if (Precedes(pruned[c], pruned[q])) cs.candidates.push_back(pruned[c]);
    }
    sets.push_back(std::move(cs));
  }
  return sets;
}

CandidateSet RestrictedCandidates(const CandidateSet &cs, Category t,
                                  const Router &router) {
  CandidateSet out{cs.query, {}};
  for (const auto &c : cs.candidates) {
    if (router.Route({c, cs.query}) == t) out.candidates.push_back(c);
  }
  return out;
}

CandidateSet RestrictedCandidates(const CandidateSet &cs, Category t,
                                  const Document &doc) {
  return RestrictedCandidates(cs, t, Router(RoutingMode::kLinguistic, doc));
}

namespace {

std::map<Span, size_t> ClusterIds(const Document &doc) {
  std::map<Span, size_t> ids;
  for (size_t k = 0; k < doc.gold_clusters.size(); ++k) {
    for (const auto &s : doc.gold_clusters[k]) ids.emplace(s, k);
  }
  return ids;
}

GoldAntecedents GoldFromIds(const CandidateSet &cs,
                            const std::map<Span, size_t> &ids) {
  GoldAntecedents gold{cs.query, {}, false};
  auto q = ids.find(cs.query);
  if (q != ids.end()) {
    for (const auto &c : cs.candidates) {
      auto it = ids.find(c);
      if (it != ids.end() && it->second == q->second) gold.gold.push_back(c);
    }
  }
  gold.null_gold = gold.gold.empty();
  return gold;
}

// -log sum_{gold} softmax(scores ++ [0]).
LossResult MarginalLoss(std::span<const double> scores,
                        const std::vector<char> &is_gold, bool null_gold) {
  const size_t m = scores.size();
  std::vector<double> all(scores.begin(), scores.end());
  all.push_back(0.0);
  std::vector<double> gold_scores;
  for (size_t i = 0; i < m; ++i) {
    if (is_gold[i]) gold_scores.push_back(scores[i]);
  }
  if (null_gold) gold_scores.push_back(0.0);
  const double lse_all = LogSumExp(all);
  const double lse_gold = LogSumExp(gold_scores);
  LossResult r;
  r.loss = lse_all - lse_gold;
  r.grad.resize(m);
  for (size_t i = 0; i < m; ++i) {
    double g = std::exp(scores[i] - lse_all);
    if (is_gold[i]) g -= std::exp(scores[i] - lse_gold);
    r.grad[i] = g;
  }
  return r;
}

LossResult LossOver(const CandidateSet &cs, const GoldAntecedents &gold,
                    std::span<const double> scores) {
  if (scores.size() != cs.candidates.size()) {
    throw std::invalid_argument("loss: one score per candidate expected");
  }
  if (gold.null_gold && !gold.gold.empty()) {
    throw std::invalid_argument("loss: eps cannot share the gold set");
  }
  if (!gold.null_gold && gold.gold.empty()) {
    throw std::invalid_argument("loss: empty gold set");
  }
  std::vector<char> is_gold(cs.candidates.size(), 0);
  for (const auto &g : gold.gold) {
    auto it = std::find(cs.candidates.begin(), cs.candidates.end(), g);
    if (it == cs.candidates.end()) {
      throw std::invalid_argument("loss: gold antecedent " + ToString(g) +
                                  " is not a candidate");
    }
    is_gold[it - cs.candidates.begin()] = 1;
  }
  return MarginalLoss(scores, is_gold, gold.null_gold);
}

}  // namespace

GoldAntecedents GoldFor(const CandidateSet &cs, const Document &doc) {
  return GoldFromIds(cs, ClusterIds(doc));
}

GoldAntecedents RestrictGold(const GoldAntecedents &gold, const CandidateSet &cs) {
  GoldAntecedents out{gold.query, {}, false};
  for (const auto &g : gold.gold) {
    if (std::find(cs.candidates.begin(), cs.candidates.end(), g) !=
        cs.candidates.end()) {
      out.gold.push_back(g);
    }
  }
  out.null_gold = out.gold.empty();
  return out;
}

LossResult CorefLoss(const CandidateSet &cs, const GoldAntecedents &gold,
                     std::span<const double> scores) {
  return LossOver(cs, gold, scores);
}

LossResult ExpertLoss(const CandidateSet &restricted, const GoldAntecedents &gold,
                      std::span<const double> scores) {
  return LossOver(restricted, gold, scores);
}

LossResult SharedLoss(const CandidateSet &cs, const GoldAntecedents &gold,
                      std::span<const double> scores) {
  return LossOver(cs, gold, scores);
}

LossBreakdown TotalLoss(const Document &doc, const Model &model,
                        const TrainConfig &cfg, std::vector<Tensor2> *grads,
                        const std::vector<Span> *fixed) {
  LossBreakdown out;
  if (doc.size() == 0) return out;
  const EncoderParams enc_params = model.Encoder();
  const ScorerParams params = model.Scorers();
  const EncoderCache enc = EncodeWithCache(doc, enc_params, model.vocab());
  DocumentScorer scorer(enc.out, params);
  const Router router(cfg.routing_mode, doc);

  const auto spans = EnumerateSpans(doc, cfg.max_span_width);
  std::vector<double> span_scores(spans.size());
  for (size_t i = 0; i < spans.size(); ++i) span_scores[i] = scorer.Mention(spans[i]);
  const auto pruned = fixed != nullptr
                          ? *fixed
                          : PruneByScores(spans, span_scores, doc.size(), cfg.top_lambda);
  std::map<Span, double> mention;
  for (size_t i = 0; i < spans.size(); ++i) mention.emplace(spans[i], span_scores[i]);
  for (const auto &s : pruned) {
    if (!mention.count(s)) mention.emplace(s, scorer.Mention(s));
  }

  const bool shared_only = cfg.routing_mode == RoutingMode::kSharedOnly;
  const bool use_shared = router.shared_enabled();
  const bool use_experts = router.experts_enabled();
  const bool full = cfg.loss_mode == LossMode::kFull;
  const auto cluster_ids = ClusterIds(doc);

  for (const auto &cs : CandidateSets(pruned)) {
    ++out.num_queries;
    const size_t m = cs.candidates.size();
    const double fq = mention.at(cs.query);
    const GoldAntecedents gold = GoldFromIds(cs, cluster_ids);

    std::vector<double> base(m), shared(m, 0.0), expert(m, 0.0);
    std::vector<Category> category(m, Category::kOther);
    for (size_t c = 0; c < m; ++c) {
      const MentionPair pair{cs.candidates[c], cs.query};
      base[c] = mention.at(cs.candidates[c]) + fq;
      if (use_shared) shared[c] = scorer.Antecedent(DocumentScorer::kSharedHead, pair);
      if (use_experts) {
        category[c] = router.Route(pair);
        expert[c] = scorer.Antecedent(DocumentScorer::ExpertHead(category[c]), pair);
      }
    }
    // Per-candidate gradients with respect to the three score parts.
    std::vector<double> d_base(m, 0.0), d_shared(m, 0.0), d_expert(m, 0.0);

    if (shared_only) {
      std::vector<double> fs(m);
      for (size_t c = 0; c < m; ++c) fs[c] = base[c] + shared[c];
      const auto r = SharedLoss(cs, gold, fs);
      out.shared += r.loss;
      out.total += r.loss;
      for (size_t c = 0; c < m; ++c) {
        d_base[c] += r.grad[c];
        d_shared[c] += r.grad[c];
      }
    } else {
      double query_loss = 0.0;
      std::vector<double> f(m);
      for (size_t c = 0; c < m; ++c) {
        double total = base[c];
        if (use_shared) total += shared[c];
        f[c] = total + expert[c];
      }
      const auto coref = CorefLoss(cs, gold, f);
      out.coref += coref.loss;
      query_loss += coref.loss;
      for (size_t c = 0; c < m; ++c) {
        d_base[c] += coref.grad[c];
        if (use_shared) d_shared[c] += coref.grad[c];
        d_expert[c] += coref.grad[c];
      }
      if (full) {
        double experts_loss = 0.0;
        for (Category t : kAllCategories) {
          std::vector<size_t> idx;
          CandidateSet restricted{cs.query, {}};
          for (size_t c = 0; c < m; ++c) {
            if (category[c] == t) {
              idx.push_back(c);
              restricted.candidates.push_back(cs.candidates[c]);
            }
          }
          if (idx.empty()) continue;  // {eps} alone: loss 0, no gradient
          std::vector<double> ft(idx.size());
          for (size_t k = 0; k < idx.size(); ++k) ft[k] = base[idx[k]] + expert[idx[k]];
          const auto r = ExpertLoss(restricted, RestrictGold(gold, restricted), ft);
          out.experts[Index(t)] += r.loss;
          experts_loss += r.loss;
          for (size_t k = 0; k < idx.size(); ++k) {
            d_base[idx[k]] += r.grad[k];
            d_expert[idx[k]] += r.grad[k];
          }
        }
        if (use_shared) {
          std::vector<double> fs(m);
          for (size_t c = 0; c < m; ++c) fs[c] = base[c] + shared[c];
          const auto r = SharedLoss(cs, gold, fs);
          out.shared += r.loss;
          experts_loss += r.loss;
          for (size_t c = 0; c < m; ++c) {
            d_base[c] += r.grad[c];
            d_shared[c] += r.grad[c];
          }
        }
        query_loss += experts_loss;
      }
      out.total += query_loss;
    }

    if (grads != nullptr) {
      for (size_t c = 0; c < m; ++c) {
        const MentionPair pair{cs.candidates[c], cs.query};
        if (d_base[c] != 0.0) {
          scorer.AddMentionGrad(cs.candidates[c], d_base[c]);
          scorer.AddMentionGrad(cs.query, d_base[c]);
        }
        if (d_shared[c] != 0.0) {
          scorer.AddAntecedentGrad(DocumentScorer::kSharedHead, pair, d_shared[c]);
        }
        if (d_expert[c] != 0.0) {
          scorer.AddAntecedentGrad(DocumentScorer::ExpertHead(category[c]), pair,
                                   d_expert[c]);
        }
      }
    }
  }

  if (grads != nullptr) {
    const auto &layout = model.layout();
    Tensor2 d_enc(enc.out.rows(), enc.out.cols());
    scorer.Backward(Model::ScorerGradsIn(layout, *grads), d_enc);
    EncodeBackward(enc, enc_params, d_enc, (*grads)[layout.embedding],
                   (*grads)[layout.w_ctx], (*grads)[layout.b_ctx]);
  }
  return out;
}

std::vector<std::vector<size_t>> MakeBatches(const std::vector<Document> &docs,
                                             size_t token_budget) {
  std::vector<std::vector<size_t>> batches;
  size_t tokens = 0;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (batches.empty() || tokens + docs[i].size() > token_budget) {
      batches.emplace_back();
      tokens = 0;
    }
    batches.back().push_back(i);
    tokens += docs[i].size();
  }
  return batches;
}

namespace {

struct Adam {
  std::vector<Tensor2> m, v;
  long step = 0;

  explicit Adam(const ParamStore &store)
      : m(store.ZeroGradsLike()), v(store.ZeroGradsLike()) {}

  void Update(ParamStore &store, const TrainConfig &cfg) {
    ++step;
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
    for (size_t p = 0; p < store.size(); ++p) {
      auto theta = store.value(p).data();
      auto g = store.grad(p).data();
      auto mp = m[p].data();
      auto vp = v[p].data();
      for (size_t k = 0; k < theta.size(); ++k) {
        mp[k] = cfg.adam_beta1 * mp[k] + (1.0 - cfg.adam_beta1) * g[k];
        vp[k] = cfg.adam_beta2 * vp[k] + (1.0 - cfg.adam_beta2) * g[k] * g[k];
        const double mhat = mp[k] / c1;
        const double vhat = vp[k] / c2;
        theta[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      }
    }
  }
};

}  // namespace

std::vector<EpochLog> TrainModel(Model &model, const std::vector<Document> &docs,
                                 const TrainConfig &cfg,
                                 const TrainOptions &options) {
  cfg.Validate();
  if (docs.empty()) throw std::invalid_argument("Train: no documents");
  const auto batches = MakeBatches(docs, cfg.token_budget_train);
  Adam adam(model.store());
  std::vector<EpochLog> log;
  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto &batch : batches) {
      std::vector<std::vector<Tensor2>> buffers(batch.size());
      std::vector<double> losses(batch.size());
      internal::ParallelFor(batch.size(), options.threads, [&](size_t i) {
        buffers[i] = model.store().ZeroGradsLike();
        try {
          losses[i] = TotalLoss(docs[batch[i]], model, cfg, &buffers[i]).total;
        } catch (const std::domain_error &) {
          // Raised by LogSumExp on NaN scores.
          losses[i] = std::numeric_limits<double>::quiet_NaN();
        }
      });
      model.store().ZeroGrad();
      for (size_t i = 0; i < batch.size(); ++i) {
        if (!std::isfinite(losses[i])) {
          throw TrainingDiverged("non-finite loss on document " +
                                 docs[batch[i]].doc_key + " in epoch " +
                                 std::to_string(epoch));
        }
        epoch_loss += losses[i];
        model.store().AccumulateGrad(buffers[i]);
      }
      adam.Update(model.store(), cfg);
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = epoch_loss / static_cast<double>(docs.size());
    entry.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    log.push_back(entry);
    if (options.on_epoch) options.on_epoch(entry);
  }
  return log;
}

TrainResult Train(const std::vector<Document> &docs, const TrainConfig &cfg,
                  const TrainOptions &options) {
  if (docs.empty()) throw std::invalid_argument("Train: no documents");
  Model model = Model::Initialize(cfg, Vocab::Build(docs, cfg.min_count));
  auto log = TrainModel(model, docs, cfg, options);
  return {std::move(model), std::move(log)};
}

int ThreadsFromEnv() {
  const char *v = std::getenv("LINGMESS_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (const std::exception &) {
    return 0;
  }
}

}  // namespace lingmess
