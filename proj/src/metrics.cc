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


#include "lingmess/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "lingmess/encoder.h"
#include "lingmess/training.h"

namespace lingmess {

namespace {

double Ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Mention -> cluster index.
std::map<Span, size_t> MentionIndex(const Clustering &c) {
  std::map<Span, size_t> out;
  for (size_t k = 0; k < c.clusters.size(); ++k) {
    for (const auto &s : c.clusters[k]) out[s] = k;
  }
  return out;
}

size_t Overlap(const std::vector<Span> &a, const std::vector<Span> &b) {
  std::set<Span> sa(a.begin(), a.end());
  size_t n = 0;
  for (const auto &s : std::set<Span>(b.begin(), b.end())) n += sa.count(s);
  return n;
}

// Sum over key clusters of |K| - |partition of K by response|, and of |K| - 1.
std::pair<double, double> MucSide(const Clustering &key, const Clustering &response) {
  const auto idx = MentionIndex(response);
  double num = 0.0, den = 0.0;
  for (const auto &k : key.clusters) {
    std::set<long> parts;
    long twin = -1;
    for (const auto &s : k) {
      auto it = idx.find(s);
      parts.insert(it == idx.end() ? twin-- : static_cast<long>(it->second));
    }
    num += static_cast<double>(k.size() - parts.size());
    den += static_cast<double>(k.size() - 1);
  }
  return {num, den};
}

std::pair<double, double> BCubedSide(const Clustering &key, const Clustering &response) {
  const auto idx = MentionIndex(response);
  double num = 0.0, den = 0.0;
  for (const auto &k : key.clusters) {
    for (const auto &s : k) {
      auto it = idx.find(s);
      const double common =
          it == idx.end() ? 1.0
                          : static_cast<double>(Overlap(k, response.clusters[it->second]));
      num += common / static_cast<double>(k.size());
      den += 1.0;
    }
  }
  return {num, den};
}

double Links(size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

std::pair<double, double> LeaSide(const Clustering &key, const Clustering &response) {
  double num = 0.0, den = 0.0;
  for (const auto &k : key.clusters) {
    double resolved = 0.0;
    if (k.size() == 1) {
      for (const auto &r : response.clusters) {
        if (r.size() == 1 && r.front() == k.front()) resolved = 1.0;
      }
      num += resolved;
    } else {
      for (const auto &r : response.clusters) resolved += Links(Overlap(k, r));
      num += static_cast<double>(k.size()) * resolved / Links(k.size());
    }
    den += static_cast<double>(k.size());
  }
  return {num, den};
}

MetricCounts FromSides(std::pair<double, double> recall,
                       std::pair<double, double> precision) {
  MetricCounts c;
  c.r_num = recall.first;
  c.r_den = recall.second;
  c.p_num = precision.first;
  c.p_den = precision.second;
  return c;
}

}  // namespace

PRF MakePRF(double precision, double recall) {
  PRF out{precision, recall, 0.0};
  if (precision + recall > 0.0) out.f1 = 2.0 * precision * recall / (precision + recall);
  return out;
}

MetricCounts &MetricCounts::operator+=(const MetricCounts &o) {
  p_num += o.p_num;
  p_den += o.p_den;
  r_num += o.r_num;
  r_den += o.r_den;
  return *this;
}

PRF MetricCounts::ToPRF() const { return MakePRF(Ratio(p_num, p_den), Ratio(r_num, r_den)); }

MetricCounts MucCounts(const Clustering &key, const Clustering &response) {
  return FromSides(MucSide(key, response), MucSide(response, key));
}

MetricCounts BCubedCounts(const Clustering &key, const Clustering &response) {
  return FromSides(BCubedSide(key, response), BCubedSide(response, key));
}

MetricCounts LeaCounts(const Clustering &key, const Clustering &response) {
  return FromSides(LeaSide(key, response), LeaSide(response, key));
}

MetricCounts CeafPhi4Counts(const Clustering &key, const Clustering &response) {
  std::vector<std::vector<double>> phi(key.clusters.size(),
                                       std::vector<double>(response.clusters.size()));
  for (size_t i = 0; i < key.clusters.size(); ++i) {
    for (size_t j = 0; j < response.clusters.size(); ++j) {
      const auto &k = key.clusters[i];
      const auto &r = response.clusters[j];
      phi[i][j] = 2.0 * static_cast<double>(Overlap(k, r)) /
                  static_cast<double>(k.size() + r.size());
    }
  }
  double total = 0.0;
  if (!phi.empty() && !response.clusters.empty()) {
    const auto assign = MaxWeightAssignment(phi);
    for (size_t i = 0; i < assign.size(); ++i) {
      if (assign[i] >= 0) total += phi[i][assign[i]];
    }
  }
  MetricCounts c;
  c.r_num = c.p_num = total;
  c.r_den = static_cast<double>(key.clusters.size());
  c.p_den = static_cast<double>(response.clusters.size());
  return c;
}

std::vector<int> MaxWeightAssignment(const std::vector<std::vector<double>> &weight) {
  const size_t rows = weight.size();
  if (rows == 0) return {};
  const size_t cols = weight.front().size();
  for (const auto &r : weight) {
    if (r.size() != cols) throw std::invalid_argument("MaxWeightAssignment: ragged matrix");
  }
  if (cols == 0) return std::vector<int>(rows, -1);
  const bool transposed = rows > cols;
  const size_t n = transposed ? cols : rows;  // n <= m
  const size_t m = transposed ? rows : cols;
  auto cost = [&](size_t i, size_t j) {
    return transposed ? -weight[j - 1][i - 1] : -weight[i - 1][j - 1];
  };
  // Shortest augmenting path with potentials, 1-based with a virtual column 0.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<size_t> p(m + 1, 0), way(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const size_t i0 = p[j0];
      double delta = kInf;
      size_t j1 = 0;
      for (size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(rows, -1);
  for (size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      out[j - 1] = static_cast<int>(p[j] - 1);
    } else {
      out[p[j] - 1] = static_cast<int>(j - 1);
    }
  }
  return out;
}

namespace {

struct DocCounts {
  MetricCounts muc, b3, ceaf, lea;
};

DocCounts CountDoc(const Clustering &k, const Clustering &r) {
  return {MucCounts(k, r), BCubedCounts(k, r), CeafPhi4Counts(k, r), LeaCounts(k, r)};
}

std::vector<std::pair<const Clustering *, const Clustering *>> Align(
    const std::vector<Clustering> &key, const std::vector<Clustering> &response) {
  std::map<std::string, const Clustering *> by_key;
  for (const auto &r : response) {
    if (!by_key.emplace(r.doc_key, &r).second) {
      throw ValidationError("duplicate doc_key in response: " + r.doc_key);
    }
  }
  std::vector<std::pair<const Clustering *, const Clustering *>> pairs;
  std::vector<std::string> missing, extra;
  std::set<std::string> seen;
  for (const auto &k : key) {
    if (!seen.insert(k.doc_key).second) {
      throw ValidationError("duplicate doc_key in key: " + k.doc_key);
    }
    auto it = by_key.find(k.doc_key);
    if (it == by_key.end()) {
      missing.push_back(k.doc_key);
    } else {
      pairs.emplace_back(&k, it->second);
    }
  }
  for (const auto &r : response) {
    if (!seen.count(r.doc_key)) extra.push_back(r.doc_key);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "doc_key mismatch;";
    if (!missing.empty()) {
      msg += " missing from response:";
      for (const auto &k : missing) msg += " " + k;
    }
    if (!extra.empty()) {
      msg += (missing.empty() ? "" : ";");
      msg += " missing from key:";
      for (const auto &k : extra) msg += " " + k;
    }
    throw ValidationError(msg);
  }
  return pairs;
}

double ConllF1(const PRF &muc, const PRF &b3, const PRF &ceaf) {
  return (muc.f1 + b3.f1 + ceaf.f1) / 3.0;
}

}  // namespace

EvalReport Evaluate(const std::vector<Clustering> &key,
                    const std::vector<Clustering> &response) {
  DocCounts total;
  for (const auto &[k, r] : Align(key, response)) {
    const DocCounts d = CountDoc(*k, *r);
    total.muc += d.muc;
    total.b3 += d.b3;
    total.ceaf += d.ceaf;
    total.lea += d.lea;
  }
  EvalReport report;
  report.muc = total.muc.ToPRF();
  report.b3 = total.b3.ToPRF();
  report.ceaf_phi4 = total.ceaf.ToPRF();
  report.lea = total.lea.ToPRF();
  report.conll_f1 = ConllF1(report.muc, report.b3, report.ceaf_phi4);
  return report;
}

std::vector<double> PerDocConllF1(const std::vector<Clustering> &key,
                                  const std::vector<Clustering> &response) {
  std::vector<double> out;
  for (const auto &[k, r] : Align(key, response)) {
    const DocCounts d = CountDoc(*k, *r);
    out.push_back(ConllF1(d.muc.ToPRF(), d.b3.ToPRF(), d.ceaf.ToPRF()));
  }
  return out;
}

std::map<Category, PairwiseStats> PairwiseByCategory(const std::vector<Document> &docs,
                                                     const Model &model,
                                                     bool pruned_only) {
  std::map<Category, PairwiseStats> stats;
  for (Category t : kAllCategories) stats[t] = {};
  const auto &cfg = model.config();
  const ScorerParams params = model.Scorers();
  for (const auto &doc : docs) {
    std::vector<Span> mentions;
    std::map<Span, size_t> cluster_of;
    for (size_t k = 0; k < doc.gold_clusters.size(); ++k) {
      for (const auto &s : doc.gold_clusters[k]) {
        mentions.push_back(s);
        cluster_of[s] = k;
      }
    }
    if (mentions.size() < 2) continue;
    std::sort(mentions.begin(), mentions.end());
    const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
    std::set<Span> kept;
    if (pruned_only) {
      const auto pruned = PruneMentions(doc, enc, params.mention, cfg);
      kept.insert(pruned.begin(), pruned.end());
    }
    const Router router(cfg.routing_mode, doc);
    const Tensor2 totals = ScoreMatrixMasked(mentions, mentions, enc, params, router);
    for (size_t q = 0; q < mentions.size(); ++q) {
      for (size_t c = 0; c < q; ++c) {
        if (pruned_only && (!kept.count(mentions[c]) || !kept.count(mentions[q]))) {
          continue;
        }
        const MentionPair pair{mentions[c], mentions[q]};
        auto &s = stats[Categorize(pair, doc)];
        const bool predicted = totals(q, c) > 0.0;
        const bool actual = cluster_of.at(pair.candidate) == cluster_of.at(pair.query);
        if (predicted && actual) ++s.tp;
        if (predicted && !actual) ++s.fp;
        if (!predicted && actual) ++s.fn;
        if (!predicted && !actual) ++s.tn;
      }
    }
  }
  for (auto &[t, s] : stats) {
    s.prf = MakePRF(Ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fp)),
                    Ratio(static_cast<double>(s.tp), static_cast<double>(s.tp + s.fn)));
  }
  return stats;
}

double PermutationTest(const std::vector<double> &a, const std::vector<double> &b,
                       int resamples, uint64_t seed) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("PermutationTest: paired lists differ in length");
  }
  if (a.empty()) throw std::invalid_argument("PermutationTest: empty input");
  if (resamples < 1000) {
    throw std::invalid_argument("PermutationTest: resamples must be >= 1000");
  }
  std::vector<double> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double n = static_cast<double>(diff.size());
  double observed = 0.0;
  for (double d : diff) observed += d;
  observed = std::abs(observed / n);
  SplitMix64 rng(seed);
  long count = 0;
  for (int r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (double d : diff) sum += rng.Below(2) ? d : -d;
    if (std::abs(sum / n) >= observed) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(resamples + 1);
}

nlohmann::ordered_json ToJson(const PRF &prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

nlohmann::ordered_json ToJson(const EvalReport &report) {
  nlohmann::ordered_json j;
  j["muc"] = ToJson(report.muc);
  j["b3"] = ToJson(report.b3);
  j["ceaf_phi4"] = ToJson(report.ceaf_phi4);
  j["lea"] = ToJson(report.lea);
  j["conll_f1"] = report.conll_f1;
  if (!report.per_category.empty()) {
    nlohmann::ordered_json cats = nlohmann::ordered_json::object();
    for (const auto &[t, s] : report.per_category) {
      auto e = ToJson(s.prf);
      e["tp"] = s.tp;
      e["fp"] = s.fp;
      e["fn"] = s.fn;
      e["tn"] = s.tn;
      cats[std::string(CategoryName(t))] = e;
    }
    j["per_category"] = cats;
  }
  return j;
}

std::string FormatTable(const EvalReport &report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  auto row = [&](const std::string &name, const PRF &p) {
    out << std::left << std::setw(12) << name << std::right << std::setw(7)
        << 100 * p.recall << std::setw(7) << 100 * p.precision << std::setw(7)
        << 100 * p.f1 << "\n";
  };
  out << std::left << std::setw(12) << "metric" << std::right << std::setw(7) << "R"
      << std::setw(7) << "P" << std::setw(7) << "F1" << "\n";
  row("MUC", report.muc);
  row("B3", report.b3);
  row("CEAF_phi4", report.ceaf_phi4);
  row("LEA", report.lea);
  out << std::left << std::setw(12) << "CoNLL F1" << std::right << std::setw(21)
      << 100 * report.conll_f1 << "\n";
  if (!report.per_category.empty()) {
    out << "\n";
    for (const auto &[t, s] : report.per_category) row(std::string(CategoryName(t)), s.prf);
  }
  return out.str();
}

}  // namespace lingmess
