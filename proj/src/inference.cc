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


#include "lingmess/inference.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "lingmess/encoder.h"
#include "lingmess/training.h"
#include "parallel.h"

namespace lingmess {

std::vector<Link> LinkAntecedents(const std::vector<Span> &pruned,
                                  const Tensor2 &totals) {
  if (totals.rows() != pruned.size() || totals.cols() != pruned.size()) {
    throw std::invalid_argument("LinkAntecedents: score matrix must be n x n");
  }
  std::vector<Link> links;
  links.reserve(pruned.size());
  for (size_t q = 0; q < pruned.size(); ++q) {
    Link link{pruned[q], std::nullopt};
    double best = 0.0;
    for (size_t c = 0; c < pruned.size(); ++c) {
      if (!Precedes(pruned[c], pruned[q])) continue;
      if (totals(q, c) > best) {
        best = totals(q, c);
        link.antecedent = pruned[c];
      }
    }
    links.push_back(link);
  }
  return links;
}

namespace {

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  size_t Find(size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void Union(size_t a, size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Clustering Normalize(std::string doc_key, std::vector<std::vector<Span>> clusters) {
  Clustering out{std::move(doc_key), {}};
  for (auto &c : clusters) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.size() >= 2) out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

Clustering BuildClusters(const std::string &doc_key, const std::vector<Link> &links) {
  std::map<Span, size_t> ids;
  auto id = [&](const Span &s) { return ids.emplace(s, ids.size()).first->second; };
  for (const auto &l : links) {
    id(l.query);
    if (l.antecedent) id(*l.antecedent);
  }
  UnionFind uf(ids.size());
  for (const auto &l : links) {
    if (l.antecedent) uf.Union(ids.at(l.query), ids.at(*l.antecedent));
  }
  std::map<size_t, std::vector<Span>> groups;
  for (const auto &[span, i] : ids) groups[uf.Find(i)].push_back(span);
  std::vector<std::vector<Span>> clusters;
  for (auto &[root, spans] : groups) clusters.push_back(std::move(spans));
  return Normalize(doc_key, std::move(clusters));
}

Clustering GoldClustering(const Document &doc) {
  return Normalize(doc.doc_key, doc.gold_clusters);
}

Clustering Predict(const Document &doc, const Model &model) {
  if (doc.size() == 0) return {doc.doc_key, {}};
  const auto &cfg = model.config();
  const ScorerParams params = model.Scorers();
  const Tensor2 enc = Encode(doc, model.Encoder(), model.vocab());
  const auto pruned = PruneMentions(doc, enc, params.mention, cfg);
  const Router router(cfg.routing_mode, doc);
  const Tensor2 totals = ScoreMatrixMasked(pruned, pruned, enc, params, router);
  return BuildClusters(doc.doc_key, LinkAntecedents(pruned, totals));
}

std::vector<Clustering> PredictAll(const std::vector<Document> &docs,
                                   const Model &model, int threads) {
  std::vector<Clustering> out(docs.size());
  internal::ParallelFor(docs.size(), threads,
                        [&](size_t i) { out[i] = Predict(docs[i], model); });
  return out;
}

Document WithClusters(const Document &doc, const Clustering &clustering) {
  Document out = doc;
  out.gold_clusters = clustering.clusters;
  return out;
}

}  // namespace lingmess
