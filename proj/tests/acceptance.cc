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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
//
//   acceptance [--data DIR] [--cli PATH] [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lingmess/categorizer.h"
#include "lingmess/checkpoint.h"
#include "lingmess/diagnostics.h"
#include "lingmess/encoder.h"
#include "lingmess/inference.h"
#include "lingmess/metrics.h"
#include "lingmess/model.h"
#include "lingmess/scorers.h"
#include "lingmess/synthdata.h"
#include "lingmess/training.h"

namespace lingmess {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string data_dir = LINGMESS_TEST_DATA;
std::string cli_path;

std::string Fmt(const char *fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

std::vector<std::string> Words(const std::string &text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

Outcome RoutingOracle() {
  struct Example {
    const char *c, *q;
    Category want;
  };
  const Example examples[] = {
      {"Lionel Messi", "He", Category::kEntPron},
      {"the U.S. and Japan", "Japan and the U.S.", Category::kMatch},
      {"This lake of fire", "the lake of fire", Category::kContains},
      {"Bill Clinton", "The President", Category::kOther},
      {"my", "I", Category::kPronPronC},
      {"She", "my", Category::kPronPronNC}};
  size_t bad = 0;
  for (const auto &e : examples) bad += Categorize(Words(e.c), Words(e.q)) != e.want;
  std::ifstream in(data_dir + "/routing_pairs.tsv");
  if (!in) return {false, "missing routing_pairs.tsv"};
  size_t rows = 0, wrong = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string c, q, name;
    std::getline(ss, c, '\t');
    std::getline(ss, q, '\t');
    std::getline(ss, name, '\t');
    const auto want = ParseCategory(name);
    ++rows;
    if (!want || Categorize(Words(c), Words(q)) != *want) ++wrong;
  }
  return {bad == 0 && wrong == 0 && rows == 200,
          Fmt("published examples %.0f/6, fixture %.0f/%.0f", 6.0 - bad,
              double(rows - wrong), double(rows))};
}

Outcome PronounTables() {
  std::string want = ReadFile(data_dir + "/tables.json");
  while (!want.empty() && want.back() == '\n') want.pop_back();
  const auto j = TablesJson();
  const bool identical = j.dump(2) == want;
  const size_t groups = j["pronoun_groups"].size();
  const size_t stop_words = j["stop_words"].size();
  size_t pronouns = 0;
  for (const auto &g : j["pronoun_groups"]) pronouns += g.size();
  return {identical && groups == 8 && stop_words == 18,
          Fmt("%.0f groups, %.0f pronouns, %.0f stop words; fixture ", double(groups),
              double(pronouns), double(stop_words)) +
              (identical ? "identical" : "differs")};
}

Outcome GradientCheck() {
  const auto r = RunGradCheck(GradCheckConfig(), kGradCheckEps);
  return {r.max_relative_error < 1e-5,
          Fmt("max relative error %.3g over %.0f entries", r.max_relative_error,
              double(r.entries_checked))};
}

// A random document of 4 to 8 tokens drawn from a small mixed vocabulary.
Document RandomDocument(SplitMix64 &rng) {
  static const char *kWords[] = {"John", "Smith", "he",  "his",  "she", "her",
                                 "the",  "car",   "it",  "Mary", "I",   "my",
                                 "bank", "they",  "him", "team", "them"};
  const size_t n = 4 + rng.Below(5);
  std::vector<std::string> words;
  for (size_t i = 0; i < n; ++i) words.push_back(kWords[rng.Below(std::size(kWords))]);
  return MakeDocument("r", {words}, {});
}

Outcome MaskEquivalence() {
  SplitMix64 rng(404);
  double worst = 0.0;
  size_t cells = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const Document doc = RandomDocument(rng);
    TrainConfig cfg;
    cfg.d_emb = cfg.d_enc = cfg.d_hidden = 4;
    cfg.seed = 1000 + inst;
    cfg.routing_mode = inst % 4 == 0   ? RoutingMode::kRandom
                       : inst % 4 == 1 ? RoutingMode::kExpertsOnly
                                       : RoutingMode::kLinguistic;
    const Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
    const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
    auto spans = EnumerateSpans(doc, 2);
    std::vector<Span> chosen;
    for (const auto &s : spans) {
      if (chosen.size() < 12 && rng.Below(3) != 0) chosen.push_back(s);
    }
    const Router router(cfg.routing_mode, doc);
    const Tensor2 m = ScoreMatrixMasked(chosen, chosen, enc, model.Scorers(), router);
    for (size_t q = 0; q < chosen.size(); ++q) {
      for (size_t c = 0; c < chosen.size(); ++c) {
        if (!std::isfinite(m(q, c))) continue;
        const double ref = PairScore({chosen[c], chosen[q]}, enc, model.Scorers(), router).total;
        worst = std::max(worst, std::abs(ref - m(q, c)));
        ++cells;
      }
    }
  }
  return {worst <= 1e-12 && cells > 0,
          Fmt("max |diff| %.3g over %.0f finite cells", worst, double(cells))};
}

// F_s and L_s computed from the mention and antecedent scorers alone.
double SharedOnlyLoss(const Document &doc, const Model &model,
                      const std::vector<Span> &pruned, size_t *pair_mismatch) {
  const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
  const ScorerParams params = model.Scorers();
  const Router router(RoutingMode::kSharedOnly, doc);
  std::map<Span, size_t> cluster;
  for (size_t k = 0; k < doc.gold_clusters.size(); ++k) {
    for (const auto &s : doc.gold_clusters[k]) cluster[s] = k;
  }
  double total = 0.0;
  for (const auto &cs : CandidateSets(pruned)) {
    std::vector<double> fs;
    GoldAntecedents gold{cs.query, {}, false};
    for (const auto &c : cs.candidates) {
      const double f = (MentionScore(c, enc, params.mention) +
                        MentionScore(cs.query, enc, params.mention)) +
                       AntecedentScore({c, cs.query}, enc, params.shared);
      fs.push_back(f);
      if (PairScore({c, cs.query}, enc, params, router).total != f) ++*pair_mismatch;
      if (cluster.count(c) && cluster.count(cs.query) && cluster[c] == cluster[cs.query]) {
        gold.gold.push_back(c);
      }
    }
    gold.null_gold = gold.gold.empty();
    total += SharedLoss(cs, gold, fs).loss;
  }
  return total;
}

Outcome SharedOnlyReduction() {
  const auto docs = Generate({20, 55});
  size_t loss_mismatch = 0, pair_mismatch = 0;
  for (size_t i = 0; i < docs.size(); ++i) {
    TrainConfig cfg;
    cfg.d_emb = cfg.d_enc = cfg.d_hidden = 6;
    cfg.seed = 500 + i;
    cfg.routing_mode = RoutingMode::kSharedOnly;
    cfg.top_lambda = 0.3;
    const Model model = Model::Initialize(cfg, Vocab::Build({docs[i]}, 1));
    const Tensor2 enc = Encode(docs[i], model.Encoder(), model.vocab());
    const auto pruned = PruneMentions(docs[i], enc, model.Scorers().mention, cfg);
    const double got = TotalLoss(docs[i], model, cfg).total;
    const double want = SharedOnlyLoss(docs[i], model, pruned, &pair_mismatch);
    loss_mismatch += got != want;
  }
  return {loss_mismatch == 0 && pair_mismatch == 0,
          Fmt("loss mismatches %.0f/20, pair-score mismatches %.0f", double(loss_mismatch),
              double(pair_mismatch))};
}

Outcome ExpertIsolation() {
  const auto docs = Generate({2, 66});
  TrainConfig cfg;
  cfg.d_emb = cfg.d_enc = cfg.d_hidden = 8;
  const Model base = Model::Initialize(cfg, Vocab::Build(docs, 1));
  size_t changed_other = 0, changed_own = 0, pairs_own = 0;
  std::set<Category> covered;
  for (Category t : kAllCategories) {
    Model perturbed = base;
    for (size_t p : perturbed.ExpertParams(t)) {
      for (double &x : perturbed.store().value(p).data()) x += 0.25;
    }
    for (const auto &doc : docs) {
      const Tensor2 enc = Encode(doc, base.Encoder(), base.vocab());
      const Router router(RoutingMode::kLinguistic, doc);
      const auto spans = EnumerateSpans(doc, 2);
      for (size_t q = 0; q < spans.size(); q += 3) {
        for (size_t c = 0; c < q; c += 2) {
          const MentionPair pair{spans[c], spans[q]};
          const auto a = PairScore(pair, enc, base.Scorers(), router);
          const auto b = PairScore(pair, enc, perturbed.Scorers(), router);
          covered.insert(a.category);
          for (Category u : kAllCategories) {
            if (u != t && a.ExpertTotal(u) != b.ExpertTotal(u)) ++changed_other;
          }
          if (a.category != t) {
            changed_other += a.total != b.total;
          } else {
            ++pairs_own;
            changed_own += a.total != b.total;
          }
        }
      }
    }
  }
  return {changed_other == 0 && covered.size() == kNumCategories && changed_own == pairs_own,
          Fmt("categories covered %.0f/6, changed scores outside the perturbed expert %.0f, "
              "inside %.0f",
              double(covered.size()), double(changed_other),
              double(changed_own)) +
              "/" + std::to_string(pairs_own)};
}

Clustering C(std::vector<std::vector<size_t>> groups) {
  Clustering c{"doc", {}};
  for (const auto &g : groups) {
    std::vector<Span> cluster;
    for (size_t i : g) cluster.push_back({i, i});
    c.clusters.push_back(cluster);
  }
  return c;
}

Outcome MetricOracles() {
  size_t bad = 0;
  auto near = [&](double a, double b) { bad += std::abs(a - b) > 1e-12; };
  const PRF muc = Muc(C({{0, 1, 2, 3}}), C({{0, 1}, {2, 3}}));
  near(muc.recall, 2.0 / 3.0);
  near(muc.precision, 1.0);
  const PRF b3 = BCubed(C({{0, 1}}), C({{0}, {1}}));
  near(b3.recall, 0.5);
  const PRF ceaf = CeafPhi4(C({{0, 1, 2}}), C({{0, 1}, {2}}));
  near(ceaf.recall, 0.8);
  near(ceaf.precision, 0.4);
  near(ceaf.f1, 0.64 / 1.2);
  const PRF lea = Lea(C({{0, 1, 2}}), C({{0, 1}}));
  near(lea.recall, 1.0 / 3.0);
  const Clustering same = C({{0, 3, 5}, {1, 2}, {4, 7}});
  for (const PRF &p : {Muc(same, same), BCubed(same, same), CeafPhi4(same, same),
                       Lea(same, same)}) {
    bad += p.precision != 1.0 || p.recall != 1.0 || p.f1 != 1.0;
  }
  // Hungarian alignment against exhaustive search.
  SplitMix64 rng(77);
  size_t mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    auto random = [&]() {
      std::vector<std::vector<size_t>> groups(1 + rng.Below(6));
      for (size_t m = 0; m < 14; ++m) {
        if (rng.Below(4) != 0) groups[rng.Below(groups.size())].push_back(m);
      }
      std::vector<std::vector<size_t>> kept;
      for (auto &g : groups) {
        if (!g.empty()) kept.push_back(g);
      }
      return C(kept);
    };
    const Clustering key = random(), resp = random();
    std::vector<size_t> perm(std::max(key.clusters.size(), resp.clusters.size()));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double total = 0.0;
      for (size_t i = 0; i < key.clusters.size(); ++i) {
        if (perm[i] >= resp.clusters.size()) continue;
        const auto &k = key.clusters[i], &r = resp.clusters[perm[i]];
        size_t inter = 0;
        for (const auto &s : k) inter += std::count(r.begin(), r.end(), s);
        total += 2.0 * inter / double(k.size() + r.size());
      }
      best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    mismatches += std::abs(CeafPhi4Counts(key, resp).r_num - best) > 1e-12;
  }
  return {bad == 0 && mismatches == 0,
          Fmt("hand examples wrong %.0f, Hungarian vs exhaustive mismatches %.0f/200",
              double(bad), double(mismatches))};
}

// Configuration used for the memorization run.
TrainConfig OverfitConfig() {
  TrainConfig cfg;
  cfg.loss_mode = LossMode::kFull;
  cfg.routing_mode = RoutingMode::kLinguistic;
  cfg.top_lambda = 1.0;
  cfg.max_span_width = 2;
  cfg.d_emb = cfg.d_enc = 32;
  cfg.d_hidden = 32;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 500;
  cfg.seed = 42;
  return cfg;
}

Outcome Overfit() {
  const auto docs = Generate({20, 1});
  const TrainConfig cfg = OverfitConfig();
  const auto result = Train(docs, cfg);
  const double loss = result.log.back().loss;
  std::vector<Clustering> gold;
  for (const auto &d : docs) gold.push_back(GoldClustering(d));
  const auto report = Evaluate(gold, PredictAll(docs, result.model));
  const auto pairwise = PairwiseByCategory(docs, result.model);
  bool pairwise_ok = true;
  std::string per_cat;
  for (const auto &[t, s] : pairwise) {
    const bool populated = s.tp + s.fn > 0;
    if (populated && s.prf.f1 != 1.0) pairwise_ok = false;
    per_cat += " " + std::string(CategorySlug(t)) + "=" + Fmt("%.3f", s.prf.f1);
  }
  return {loss < 1e-2 && report.conll_f1 == 1.0 && pairwise_ok,
          Fmt("epochs %.0f, final loss %.3g, conll_f1 %.4f;", double(result.log.size()), loss,
              report.conll_f1) +
              " pairwise F1" + per_cat};
}

Outcome AblationDirection() {
  const auto train = Generate({20, 1});
  SynthSpec heldout_spec{10, 9};
  heldout_spec.heldout_names = true;
  heldout_spec.ambiguous_episodes = 2;
  const auto heldout = Generate(heldout_spec);
  std::vector<Clustering> gold;
  for (const auto &d : heldout) gold.push_back(GoldClustering(d));
  auto run = [&](LossMode loss, RoutingMode routing, uint64_t seed) {
    TrainConfig cfg = OverfitConfig();
    cfg.epochs = 60;
    cfg.loss_mode = loss;
    cfg.routing_mode = routing;
    cfg.seed = seed;
    const auto model = Train(train, cfg).model;
    return Evaluate(gold, PredictAll(heldout, model)).conll_f1;
  };
  std::vector<double> full, coref, random;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    full.push_back(run(LossMode::kFull, RoutingMode::kLinguistic, seed));
    coref.push_back(run(LossMode::kCorefOnly, RoutingMode::kLinguistic, seed));
    random.push_back(run(LossMode::kFull, RoutingMode::kRandom, seed));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double mf = median(full), mc = median(coref), mr = median(random);
  return {mf >= mc && mf >= mr,
          Fmt("median conll_f1 full %.4f, coref_only %.4f, random routing %.4f", mf, mc, mr)};
}

Outcome PermutationSanity() {
  SplitMix64 rng(10);
  std::vector<double> a(50), b(50);
  for (size_t i = 0; i < 50; ++i) {
    a[i] = rng.NextDouble();
    b[i] = a[i] + 10.0;
  }
  const double same = PermutationTest(a, a, 10000, 2026);
  const double shifted = PermutationTest(b, a, 10000, 2026);
  return {same == 1.0 && shifted <= 0.01,
          Fmt("identical p=%.4f, +10 shift p=%.6f", same, shifted)};
}

Outcome Determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lingmess_acceptance";
  fs::create_directories(dir);
  const auto docs = Generate({3, 8});
  bool runs_equal = false;
  std::string how;
  if (!cli_path.empty()) {
    {
      std::ofstream out(dir / "train.jsonl");
      for (const auto &d : docs) out << ToJsonLine(d) << "\n";
    }
    auto train = [&](const std::string &name) {
      const std::string cmd = "\"" + cli_path + "\" train --quiet --train \"" +
                              (dir / "train.jsonl").string() + "\" --out \"" +
                              (dir / name).string() +
                              "\" --epochs 3 --d-hidden 8 --d-emb 8 --d-enc 8 --seed 5";
      return std::system(cmd.c_str());
    };
    const int r1 = train("a.ckpt"), r2 = train("b.ckpt");
    runs_equal = r1 == 0 && r2 == 0 &&
                 ReadFile((dir / "a.ckpt").string()) == ReadFile((dir / "b.ckpt").string());
    how = "cli train twice";
  } else {
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.d_emb = cfg.d_enc = cfg.d_hidden = 8;
    runs_equal = SerializeCheckpoint(Train(docs, cfg).model) ==
                 SerializeCheckpoint(Train(docs, cfg).model);
    how = "library train twice";
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.d_emb = cfg.d_enc = cfg.d_hidden = 8;
  const Model model = Train(docs, cfg).model;
  const std::string path = (dir / "roundtrip.ckpt").string();
  SaveCheckpoint(model, path);
  const std::string first = ReadFile(path);
  SaveCheckpoint(LoadCheckpoint(path), path);
  const bool roundtrip = ReadFile(path) == first;
  fs::remove_all(dir);
  return {runs_equal && roundtrip, how + (runs_equal ? " identical" : " differ") +
                                       ", save-load-save " +
                                       (roundtrip ? "identical" : "differs")};
}

}  // namespace
}  // namespace lingmess

int main(int argc, char **argv) {
  using namespace lingmess;
  int only = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--data") == 0) data_dir = argv[i + 1];
    if (std::strcmp(argv[i], "--cli") == 0) cli_path = argv[i + 1];
    if (std::strcmp(argv[i], "--only") == 0) only = std::atoi(argv[i + 1]);
  }
  struct Criterion {
    const char *name;
    std::function<Outcome()> run;
    double budget_seconds;  // 0: no limit
  };
  const std::vector<Criterion> criteria = {
      {"routing oracle", RoutingOracle, 1},
      {"pronoun tables", PronounTables, 0},
      {"gradient check", GradientCheck, 30},
      {"mask equivalence", MaskEquivalence, 10},
      {"shared-only reduction", SharedOnlyReduction, 0},
      {"expert isolation", ExpertIsolation, 0},
      {"metric oracles", MetricOracles, 30},
      {"overfit reproduction", Overfit, 600},
      {"ablation direction", AblationDirection, 0},
      {"permutation test sanity", PermutationSanity, 0},
      {"determinism", Determinism, 0}};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<size_t>(only) != i + 1) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = criteria[i].budget_seconds;
    if (budget > 0 && secs > budget) {
      o.pass = false;
      o.detail += Fmt("; over the %.0fs budget", budget);
    }
    std::printf("%s %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
