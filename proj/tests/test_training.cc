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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "lingmess/diagnostics.h"
#include "lingmess/encoder.h"
#include "lingmess/model.h"
#include "lingmess/numerics.h"
#include "lingmess/synthdata.h"
#include "lingmess/training.h"

namespace lingmess {
namespace {

Document SmallDoc() {
  return MakeDocument(
      "small",
      {{"Lionel", "Messi", "thanked", "his", "team", "."},
       {"He", "smiled", "and", "the", "team", "cheered", "him", "."}},
      {{{0, 1}, {3, 3}, {6, 6}, {12, 12}}, {{4, 4}, {9, 10}}});
}

TrainConfig TinyConfig(uint64_t seed = 7) {
  TrainConfig cfg;
  cfg.d_emb = cfg.d_enc = cfg.d_hidden = 4;
  cfg.seed = seed;
  cfg.max_span_width = 2;
  return cfg;
}

std::vector<Span> AllSpans(size_t n) {
  std::vector<Span> out;
  for (size_t i = 0; i < n; ++i) out.push_back({i, i});
  return out;
}

// Independent -log marginal over explicit candidate scores plus eps at 0.
double RefMarginal(const std::vector<double> &scores, const std::vector<bool> &gold,
                   bool null_gold) {
  long double all = 1.0L, good = null_gold ? 1.0L : 0.0L;
  for (size_t i = 0; i < scores.size(); ++i) {
    const long double e = std::exp(static_cast<long double>(scores[i]));
    all += e;
    if (gold[i]) good += e;
  }
  return static_cast<double>(std::log(all) - std::log(good));
}

TEST(Prune, LambdaOneWidthOneKeepsEverything) {
  const auto spans = AllSpans(5);
  const std::vector<double> scores = {3, -1, 0, 2, 9};
  EXPECT_EQ(PruneByScores(spans, scores, 5, 1.0), spans);
}

TEST(Prune, TiesBreakByPosition) {
  const auto spans = AllSpans(4);
  const std::vector<double> scores(4, 0.5);
  const std::vector<Span> want = {{0, 0}, {1, 1}};
  EXPECT_EQ(PruneByScores(spans, scores, 4, 0.5), want);
}

TEST(Prune, KeepCountIsCeilOfLambdaTimesTokens) {
  const auto spans = AllSpans(10);
  const std::vector<double> scores(10, 0.0);
  EXPECT_EQ(PruneByScores(spans, scores, 10, 0.25).size(), 3u);
  EXPECT_EQ(PruneByScores(spans, scores, 10, 0.01).size(), 1u);
  // More spans than tokens: the token count governs.
  const std::vector<Span> wide = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}};
  const std::vector<double> ws(5, 0.0);
  EXPECT_EQ(PruneByScores(wide, ws, 3, 1.0).size(), 3u);
}

TEST(Prune, MatchesSortOracle) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng.Below(12);
    std::vector<Span> spans;
    for (size_t s = 0; s < n; ++s) {
      for (size_t e = s; e < std::min(n, s + 3); ++e) spans.push_back({s, e});
    }
    std::vector<double> scores(spans.size());
    for (auto &x : scores) x = static_cast<double>(rng.Below(5));  // many ties
    const double lambda = 0.05 + 0.95 * rng.NextDouble();
    // Oracle: rank by (-score, start, end) through tuples, keep k, re-sort.
    std::vector<std::tuple<double, size_t, size_t>> keyed;
    for (size_t i = 0; i < spans.size(); ++i) {
      keyed.emplace_back(-scores[i], spans[i].start, spans[i].end);
    }
    std::sort(keyed.begin(), keyed.end());
    const size_t k = std::min(spans.size(),
                              static_cast<size_t>(std::ceil(lambda * n)));
    std::vector<Span> want;
    for (size_t i = 0; i < k; ++i) {
      want.push_back({std::get<1>(keyed[i]), std::get<2>(keyed[i])});
    }
    std::sort(want.begin(), want.end());
    EXPECT_EQ(PruneByScores(spans, scores, n, lambda), want);
  }
}

TEST(Prune, RaisingLambdaNeverDropsASpan) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 2 + rng.Below(10);
    std::vector<Span> spans;
    for (size_t s = 0; s < n; ++s) {
      for (size_t e = s; e < std::min(n, s + 2); ++e) spans.push_back({s, e});
    }
    std::vector<double> scores(spans.size());
    for (auto &x : scores) x = rng.Uniform(-2, 2);
    std::set<Span> prev;
    for (double lambda = 0.1; lambda <= 1.0; lambda += 0.1) {
      const auto kept = PruneByScores(spans, scores, n, lambda);
      const std::set<Span> now(kept.begin(), kept.end());
      for (const auto &s : prev) EXPECT_TRUE(now.count(s));
      prev = now;
    }
  }
}

TEST(Prune, Errors) {
  const auto spans = AllSpans(3);
  const std::vector<double> two = {1, 2};
  EXPECT_THROW(PruneByScores(spans, two, 3, 0.5), std::invalid_argument);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(PruneByScores(spans, three, 3, 0.0), std::invalid_argument);
  EXPECT_THROW(PruneByScores(spans, three, 3, 1.5), std::invalid_argument);
}

TEST(PruneMentions, UsesMentionScores) {
  const Document doc = SmallDoc();
  TrainConfig cfg = TinyConfig();
  cfg.top_lambda = 0.3;
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
  const auto spans = EnumerateSpans(doc, cfg.max_span_width);
  std::vector<double> scores;
  for (const auto &s : spans) scores.push_back(MentionScore(s, enc, model.Scorers().mention));
  EXPECT_EQ(PruneMentions(doc, enc, model.Scorers().mention, cfg),
            PruneByScores(spans, scores, doc.size(), cfg.top_lambda));
  EXPECT_EQ(PruneMentions(doc, enc, model.Scorers().mention, cfg).size(), 5u);
}

TEST(CandidateSets, Examples) {
  const std::vector<Span> pruned = {{0, 0}, {1, 2}, {4, 4}};
  const auto sets = CandidateSets(pruned);
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_TRUE(sets[0].candidates.empty());
  EXPECT_EQ(sets[2].query, (Span{4, 4}));
  EXPECT_EQ(sets[2].candidates, (std::vector<Span>{{0, 0}, {1, 2}}));
}

TEST(CandidateSets, CountsMatchBruteForce) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::set<Span> chosen;
    for (int i = 0; i < 12; ++i) {
      const size_t s = rng.Below(15);
      chosen.insert({s, s + rng.Below(3)});
    }
    const std::vector<Span> pruned(chosen.begin(), chosen.end());
    const auto sets = CandidateSets(pruned);
    ASSERT_EQ(sets.size(), pruned.size());
    for (size_t q = 0; q < pruned.size(); ++q) {
      size_t count = 0;
      for (const auto &c : pruned) {
        if (c.start < pruned[q].start ||
            (c.start == pruned[q].start && c.end < pruned[q].end)) {
          ++count;
        }
      }
      EXPECT_EQ(sets[q].candidates.size(), count);
    }
  }
}

TEST(RestrictedCandidates, EntityPronounExample) {
  const Document doc = SmallDoc();
  const CandidateSet cs{{6, 6}, {{0, 1}, {3, 3}}};
  const auto r = RestrictedCandidates(cs, Category::kEntPron, doc);
  EXPECT_EQ(r.query, cs.query);
  EXPECT_EQ(r.candidates, (std::vector<Span>{{0, 1}}));
  EXPECT_EQ(RestrictedCandidates(cs, Category::kPronPronC, doc).candidates,
            (std::vector<Span>{{3, 3}}));
}

TEST(RestrictedCandidates, NoCandidateOfType) {
  const Document doc = SmallDoc();
  const CandidateSet cs{{6, 6}, {{0, 1}, {3, 3}}};
  EXPECT_TRUE(RestrictedCandidates(cs, Category::kMatch, doc).candidates.empty());
}

TEST(RestrictedCandidates, EqualsBruteForceFilterAndIsSound) {
  const auto docs = Generate({2, 9});
  for (const auto &doc : docs) {
    const auto sets = CandidateSets(EnumerateSpans(doc, 2));
    for (size_t q = 0; q < sets.size(); q += 7) {
      std::set<Span> seen;
      for (Category t : kAllCategories) {
        const auto r = RestrictedCandidates(sets[q], t, doc);
        std::vector<Span> want;
        for (const auto &c : sets[q].candidates) {
          if (Categorize({c, sets[q].query}, doc) == t) want.push_back(c);
        }
        EXPECT_EQ(r.candidates, want);
        for (const auto &c : r.candidates) EXPECT_TRUE(seen.insert(c).second);
      }
      EXPECT_EQ(seen.size(), sets[q].candidates.size());
    }
  }
}

TEST(RestrictedCandidates, RandomRouter) {
  const Document doc = SmallDoc();
  const CandidateSet cs{{12, 12}, {{0, 1}, {3, 3}, {4, 4}, {6, 6}, {9, 10}}};
  const Router router(RoutingMode::kRandom, doc);
  for (Category t : kAllCategories) {
    for (const auto &c : RestrictedCandidates(cs, t, router).candidates) {
      EXPECT_EQ(CategorizeRandom({c, cs.query}, doc), t);
    }
  }
}

TEST(Gold, ClusterMembersBeforeTheQuery) {
  const Document doc = SmallDoc();
  const CandidateSet cs{{6, 6}, {{0, 1}, {3, 3}, {4, 4}}};
  const auto g = GoldFor(cs, doc);
  EXPECT_FALSE(g.null_gold);
  EXPECT_EQ(g.gold, (std::vector<Span>{{0, 1}, {3, 3}}));
  const auto none = GoldFor({{5, 5}, {{0, 1}}}, doc);
  EXPECT_TRUE(none.null_gold);
  EXPECT_TRUE(none.gold.empty());
}

TEST(Gold, RestrictFallsBackToEps) {
  const GoldAntecedents g{{6, 6}, {{0, 1}, {3, 3}}, false};
  const auto r1 = RestrictGold(g, {{6, 6}, {{0, 1}}});
  EXPECT_EQ(r1.gold, (std::vector<Span>{{0, 1}}));
  EXPECT_FALSE(r1.null_gold);
  const auto r2 = RestrictGold(g, {{6, 6}, {{4, 4}}});
  EXPECT_TRUE(r2.gold.empty());
  EXPECT_TRUE(r2.null_gold);
}

TEST(CorefLoss, EpsOnly) {
  const auto r = CorefLoss({{0, 0}, {}}, {{0, 0}, {}, true}, {});
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_TRUE(r.grad.empty());
}

TEST(CorefLoss, TwoEqualCandidatesOneGold) {
  const CandidateSet cs{{5, 5}, {{0, 0}, {2, 2}}};
  const std::vector<double> scores = {0.0, 0.0};
  const auto r = CorefLoss(cs, {{5, 5}, {{2, 2}}, false}, scores);
  EXPECT_NEAR(r.loss, std::log(3.0), 1e-15);
  EXPECT_NEAR(r.grad[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.grad[1], 1.0 / 3.0 - 1.0, 1e-15);
  const std::vector<double> shifted = {4.0, 4.0};
  EXPECT_NEAR(CorefLoss(cs, {{5, 5}, {{2, 2}}, false}, shifted).loss,
              std::log(2.0 + std::exp(-4.0)) , 1e-12);
}

TEST(CorefLoss, GradientMatchesFiniteDifferences) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t m = 1 + rng.Below(6);
    CandidateSet cs{{100, 100}, {}};
    std::vector<double> scores(m);
    for (size_t i = 0; i < m; ++i) {
      cs.candidates.push_back({i, i});
      scores[i] = rng.Uniform(-3, 3);
    }
    GoldAntecedents gold{cs.query, {}, false};
    for (size_t i = 0; i < m; ++i) {
      if (rng.Below(2)) gold.gold.push_back(cs.candidates[i]);
    }
    gold.null_gold = gold.gold.empty();
    const auto r = CorefLoss(cs, gold, scores);
    std::vector<bool> is_gold(m);
    for (size_t i = 0; i < m; ++i) {
      is_gold[i] = std::find(gold.gold.begin(), gold.gold.end(), cs.candidates[i]) !=
                   gold.gold.end();
    }
    EXPECT_NEAR(r.loss, RefMarginal(scores, is_gold, gold.null_gold), 1e-12);
    const double h = 1e-5;
    for (size_t i = 0; i < m; ++i) {
      auto up = scores, down = scores;
      up[i] += h;
      down[i] -= h;
      const double fd = (CorefLoss(cs, gold, up).loss - CorefLoss(cs, gold, down).loss) /
                        (2 * h);
      EXPECT_LT(std::abs(fd - r.grad[i]), 1e-6);
    }
  }
}

TEST(CorefLoss, Errors) {
  const CandidateSet cs{{5, 5}, {{0, 0}, {2, 2}}};
  const std::vector<double> two = {0, 0}, one = {0};
  EXPECT_THROW(CorefLoss(cs, {{5, 5}, {{3, 3}}, false}, two), std::invalid_argument);
  EXPECT_THROW(CorefLoss(cs, {{5, 5}, {}, false}, two), std::invalid_argument);
  EXPECT_THROW(CorefLoss(cs, {{5, 5}, {{0, 0}}, true}, two), std::invalid_argument);
  EXPECT_THROW(CorefLoss(cs, {{5, 5}, {{0, 0}}, false}, one), std::invalid_argument);
}

TEST(ExpertLoss, EpsOnly) {
  EXPECT_EQ(ExpertLoss({{3, 3}, {}}, {{3, 3}, {}, true}, {}).loss, 0.0);
}

TEST(ExpertLoss, DominantGoldDrivesLossToZero) {
  const CandidateSet cs{{9, 9}, {{0, 0}, {1, 1}, {2, 2}}};
  const std::vector<double> scores = {-3.0, 60.0, 1.0};
  const auto r = ExpertLoss(cs, {{9, 9}, {{1, 1}}, false}, scores);
  EXPECT_LT(r.loss, 1e-20);
  EXPECT_GE(r.loss, 0.0);
}

TEST(ExpertLoss, ThreeCandidateArithmetic) {
  // scores 1, 2, -1 plus eps; gold = {first, third}.
  const CandidateSet cs{{9, 9}, {{0, 0}, {1, 1}, {2, 2}}};
  const std::vector<double> scores = {1.0, 2.0, -1.0};
  const auto r = ExpertLoss(cs, {{9, 9}, {{0, 0}, {2, 2}}, false}, scores);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(-1.0) + 1.0;
  const double g = std::exp(1.0) + std::exp(-1.0);
  EXPECT_NEAR(r.loss, std::log(z) - std::log(g), 1e-14);
  EXPECT_NEAR(r.grad[1], std::exp(2.0) / z, 1e-14);
  EXPECT_NEAR(r.grad[0], std::exp(1.0) / z - std::exp(1.0) / g, 1e-14);
}

TEST(SharedLoss, SameShapesAsCoref) {
  EXPECT_EQ(SharedLoss({{0, 0}, {}}, {{0, 0}, {}, true}, {}).loss, 0.0);
  const CandidateSet cs{{5, 5}, {{0, 0}, {2, 2}}};
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_NEAR(SharedLoss(cs, {{5, 5}, {{0, 0}}, false}, zeros).loss, std::log(3.0), 1e-15);
  const std::vector<double> scores = {0.5, -2.0};
  EXPECT_NEAR(SharedLoss(cs, {{5, 5}, {}, true}, scores).loss,
              RefMarginal({0.5, -2.0}, {false, false}, true), 1e-14);
}

// Component-sum oracle built from PairScore and plain softmax arithmetic.
struct RefBreakdown {
  double coref = 0, shared = 0, total = 0;
  std::array<double, kNumCategories> experts{};
};

RefBreakdown RefTotalLoss(const Document &doc, const Model &model, const TrainConfig &cfg,
                          const std::vector<Span> &pruned) {
  const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
  const Router router(cfg.routing_mode, doc);
  std::map<Span, size_t> cluster;
  for (size_t k = 0; k < doc.gold_clusters.size(); ++k) {
    for (const auto &s : doc.gold_clusters[k]) cluster[s] = k;
  }
  RefBreakdown out;
  for (size_t q = 0; q < pruned.size(); ++q) {
    std::vector<PairScoreBreakdown> pairs;
    std::vector<bool> gold;
    for (size_t c = 0; c < q; ++c) {
      pairs.push_back(PairScore({pruned[c], pruned[q]}, enc, model.Scorers(), router));
      gold.push_back(cluster.count(pruned[c]) && cluster.count(pruned[q]) &&
                     cluster[pruned[c]] == cluster[pruned[q]]);
    }
    const bool any = std::find(gold.begin(), gold.end(), true) != gold.end();
    std::vector<double> f, fs;
    for (const auto &p : pairs) {
      f.push_back(p.total);
      fs.push_back(p.SharedTotal());
    }
    if (cfg.routing_mode == RoutingMode::kSharedOnly) {
      out.shared += RefMarginal(fs, gold, !any);
      continue;
    }
    out.coref += RefMarginal(f, gold, !any);
    if (cfg.loss_mode != LossMode::kFull) continue;
    if (router.shared_enabled()) out.shared += RefMarginal(fs, gold, !any);
    for (Category t : kAllCategories) {
      std::vector<double> ft;
      std::vector<bool> gt;
      for (size_t c = 0; c < pairs.size(); ++c) {
        if (pairs[c].category != t) continue;
        ft.push_back(pairs[c].ExpertTotal(t));
        gt.push_back(gold[c]);
      }
      const bool any_t = std::find(gt.begin(), gt.end(), true) != gt.end();
      out.experts[Index(t)] += RefMarginal(ft, gt, !any_t);
    }
  }
  out.total = out.coref + out.shared;
  for (double e : out.experts) out.total += e;
  return out;
}

TEST(TotalLoss, SinglePrunedSpanIsZero) {
  const Document doc = SmallDoc();
  const TrainConfig cfg = TinyConfig();
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  const std::vector<Span> one = {{0, 1}};
  const auto b = TotalLoss(doc, model, cfg, nullptr, &one);
  EXPECT_EQ(b.total, 0.0);
  EXPECT_EQ(b.num_queries, 1u);
}

TEST(TotalLoss, FullModeEqualsComponentSumOnThreeSpans) {
  const Document doc = SmallDoc();
  const TrainConfig cfg = TinyConfig();
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  const std::vector<Span> three = {{0, 1}, {3, 3}, {6, 6}};
  const auto b = TotalLoss(doc, model, cfg, nullptr, &three);
  const auto ref = RefTotalLoss(doc, model, cfg, three);
  EXPECT_NEAR(b.coref, ref.coref, 1e-10);
  EXPECT_NEAR(b.shared, ref.shared, 1e-10);
  for (size_t t = 0; t < kNumCategories; ++t) EXPECT_NEAR(b.experts[t], ref.experts[t], 1e-10);
  EXPECT_NEAR(b.total, ref.total, 1e-10);
  EXPECT_GT(b.experts[Index(Category::kEntPron)], 0.0);
}

TEST(TotalLoss, DecompositionAcrossModes) {
  const auto docs = Generate({3, 4});
  for (const auto &doc : docs) {
    for (auto routing : {RoutingMode::kLinguistic, RoutingMode::kRandom,
                         RoutingMode::kSharedOnly, RoutingMode::kExpertsOnly}) {
      for (auto loss : {LossMode::kFull, LossMode::kCorefOnly}) {
        TrainConfig cfg = TinyConfig(3);
        cfg.routing_mode = routing;
        cfg.loss_mode = loss;
        cfg.top_lambda = 0.4;
        Model model = Model::Initialize(cfg, Vocab::Build(docs, 1));
        const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
        const auto pruned = PruneMentions(doc, enc, model.Scorers().mention, cfg);
        const auto b = TotalLoss(doc, model, cfg);
        const auto ref = RefTotalLoss(doc, model, cfg, pruned);
        double sum = b.coref + b.shared;
        for (double e : b.experts) sum += e;
        EXPECT_NEAR(b.total, sum, 1e-10);
        EXPECT_NEAR(b.total, ref.total, 1e-10 * std::max(1.0, ref.total));
        EXPECT_NEAR(b.coref, ref.coref, 1e-10 * std::max(1.0, ref.coref));
        EXPECT_EQ(b.num_queries, pruned.size());
      }
    }
  }
}

TEST(TotalLoss, SharedOnlyIsTheSharedLossAlone) {
  const Document doc = SmallDoc();
  TrainConfig cfg = TinyConfig();
  cfg.routing_mode = RoutingMode::kSharedOnly;
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  const auto spans = EnumerateSpans(doc, 1);
  auto grads = model.store().ZeroGradsLike();
  const auto b = TotalLoss(doc, model, cfg, &grads, &spans);
  EXPECT_EQ(b.coref, 0.0);
  EXPECT_EQ(b.total, b.shared);
  for (double e : b.experts) EXPECT_EQ(e, 0.0);
  EXPECT_NEAR(b.shared, RefTotalLoss(doc, model, cfg, spans).shared, 1e-10);
  // Expert heads receive no gradient.
  for (Category t : kAllCategories) {
    for (size_t p : model.ExpertParams(t)) {
      for (double g : grads[p].data()) EXPECT_EQ(g, 0.0);
    }
  }
}

TEST(TotalLoss, GradientCheckOnBundledDocument) {
  const auto r = RunGradCheck(GradCheckConfig(), kGradCheckEps);
  EXPECT_LT(r.max_relative_error, 1e-5);
  EXPECT_GT(r.entries_checked, 0u);
}

// Five instances of the 8-token check document with distinct initializations,
// each in its own loss and routing mode.
TEST(TotalLoss, GradientCheckInstances) {
  const Document doc = GradCheckDocument();
  ASSERT_EQ(doc.size(), 8u);
  const std::vector<std::tuple<uint64_t, RoutingMode, LossMode>> cases = {
      {1, RoutingMode::kLinguistic, LossMode::kFull},
      {5, RoutingMode::kRandom, LossMode::kFull},
      {12, RoutingMode::kExpertsOnly, LossMode::kFull},
      {13, RoutingMode::kLinguistic, LossMode::kCorefOnly},
      {28, RoutingMode::kSharedOnly, LossMode::kFull},
      {30, RoutingMode::kLinguistic, LossMode::kFull}};
  for (const auto &[seed, routing, loss] : cases) {
    TrainConfig cfg = GradCheckConfig();
    cfg.seed = seed;
    cfg.routing_mode = routing;
    cfg.loss_mode = loss;
    const auto r = RunGradCheck(cfg, kGradCheckEps);
    EXPECT_LT(r.max_relative_error, 1e-5) << "seed " << seed;
  }
}

TEST(TotalLoss, GradientsThroughPruningMatchFixedSpans) {
  const Document doc = SmallDoc();
  const TrainConfig cfg = TinyConfig();
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
  const auto pruned = PruneMentions(doc, enc, model.Scorers().mention, cfg);
  auto a = model.store().ZeroGradsLike(), b = model.store().ZeroGradsLike();
  const double la = TotalLoss(doc, model, cfg, &a).total;
  const double lb = TotalLoss(doc, model, cfg, &b, &pruned).total;
  EXPECT_EQ(la, lb);
  EXPECT_EQ(a, b);
}

TEST(MakeBatches, GreedyByTokenBudget) {
  std::vector<Document> docs;
  for (size_t len : {3, 4, 2, 6, 1}) {
    std::vector<std::string> words(len, "w");
    docs.push_back(MakeDocument("d", {words}, {}));
  }
  const std::vector<std::vector<size_t>> want = {{0, 1}, {2}, {3, 4}};
  EXPECT_EQ(MakeBatches(docs, 7), want);
  const std::vector<std::vector<size_t>> solo = {{0}, {1}, {2}, {3}, {4}};
  EXPECT_EQ(MakeBatches(docs, 1), solo);
  EXPECT_TRUE(MakeBatches({}, 5).empty());
}

TEST(Train, ZeroEpochsKeepsInitialization) {
  const auto docs = Generate({2, 1});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 0;
  const auto result = Train(docs, cfg);
  const Model init = Model::Initialize(cfg, Vocab::Build(docs, cfg.min_count));
  EXPECT_TRUE(result.log.empty());
  for (size_t p = 0; p < init.store().size(); ++p) {
    EXPECT_EQ(result.model.store().value(p), init.store().value(p));
  }
}

TEST(Train, ZeroLearningRateKeepsLossConstant) {
  const auto docs = Generate({2, 1});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  const auto log = Train(docs, cfg).log;
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].loss, log[1].loss);
  EXPECT_EQ(log[1].loss, log[2].loss);
  EXPECT_EQ(log[0].epoch, 1);
}

TEST(Train, EpochLossIsMeanDocumentLossBeforeTheFirstUpdate) {
  const auto docs = Generate({3, 2});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 1;
  cfg.token_budget_train = 1000000;
  const Model init = Model::Initialize(cfg, Vocab::Build(docs, cfg.min_count));
  double sum = 0;
  for (const auto &d : docs) sum += TotalLoss(d, init, cfg).total;
  const auto log = Train(docs, cfg).log;
  EXPECT_NEAR(log[0].loss, sum / 3.0, 1e-9 * sum);
}

TEST(Train, LossDecreases) {
  const auto docs = Generate({2, 1});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 15;
  cfg.learning_rate = 1e-2;
  const auto log = Train(docs, cfg).log;
  EXPECT_LT(log.back().loss, log.front().loss);
}

TEST(Train, ThreadCountDoesNotChangeResults) {
  const auto docs = Generate({4, 6});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 2;
  cfg.token_budget_train = 400;
  TrainOptions serial, parallel;
  parallel.threads = 3;
  const auto a = Train(docs, cfg, serial);
  const auto b = Train(docs, cfg, parallel);
  for (size_t p = 0; p < a.model.store().size(); ++p) {
    EXPECT_EQ(a.model.store().value(p), b.model.store().value(p));
  }
  ASSERT_EQ(a.log.size(), b.log.size());
  for (size_t e = 0; e < a.log.size(); ++e) EXPECT_EQ(a.log[e].loss, b.log[e].loss);
}

TEST(Train, CallbackSeesEveryEpoch) {
  const auto docs = Generate({1, 1});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 4;
  std::vector<int> seen;
  TrainOptions opt;
  opt.on_epoch = [&](const EpochLog &e) { seen.push_back(e.epoch); };
  Train(docs, cfg, opt);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4}));
}

TEST(Train, NonFiniteLossAborts) {
  const auto docs = Generate({1, 1});
  TrainConfig cfg = TinyConfig();
  cfg.epochs = 1;
  Model model = Model::Initialize(cfg, Vocab::Build(docs, 1));
  model.store().value(model.layout().shared.b_ss)(0, 0) =
      std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TrainModel(model, docs, cfg), TrainingDiverged);
}

TEST(Train, EmptyCorpusRejected) {
  EXPECT_THROW(Train({}, TinyConfig()), std::invalid_argument);
}

}  // namespace
}  // namespace lingmess
