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

#include "lingmess/encoder.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "lingmess/categorizer.h"

namespace lingmess {

Vocab::Vocab() : entries_{"<unk>", "<pad>"} {}

Vocab Vocab::FromEntries(std::vector<std::string> entries) {
  if (entries.size() < 2) {
    throw std::invalid_argument("Vocab: reserved entries missing");
  }
  Vocab v;
  v.entries_ = std::move(entries);
  v.ids_.clear();
  for (size_t i = 2; i < v.entries_.size(); ++i) {
    if (!v.ids_.emplace(v.entries_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("Vocab: duplicate entry " + v.entries_[i]);
    }
  }
  return v;
}

Vocab Vocab::Build(const std::vector<Document> &docs, int min_count) {
  std::map<std::string, long> counts;
  for (const auto &doc : docs) {
    for (const auto &tok : doc.tokens) ++counts[Lowercase(tok.text)];
  }
  std::vector<std::pair<std::string, long>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  std::vector<std::string> entries = {"<unk>", "<pad>"};
  for (const auto &[word, count] : sorted) {
    if (count >= min_count) entries.push_back(word);
  }
  return FromEntries(std::move(entries));
}

int Vocab::Id(std::string_view word) const {
  auto it = ids_.find(Lowercase(word));
  return it == ids_.end() ? kUnk : it->second;
}

EncoderCache EncodeWithCache(const Document &doc, const EncoderParams &params,
                             const Vocab &vocab) {
  const size_t n = doc.size();
  const size_t d_emb = params.embedding.cols();
  const size_t d_enc = params.w_ctx.rows();
  if (params.w_ctx.cols() != 3 * d_emb || params.b_ctx.rows() != d_enc ||
      params.b_ctx.cols() != 1 || params.embedding.rows() != vocab.size()) {
    throw std::invalid_argument("Encode: parameter shapes do not match");
  }
  EncoderCache cache;
  cache.ids.resize(n);
  cache.prev.resize(n);
  cache.next.resize(n);
  cache.context = Tensor2(n, 3 * d_emb);
  cache.pre = Tensor2(n, d_enc);
  cache.out = Tensor2(n, d_enc);
  for (size_t i = 0; i < n; ++i) {
    cache.ids[i] = vocab.Id(doc.tokens[i].text);
    const size_t sent = doc.tokens[i].sentence_index;
    cache.prev[i] =
        (i > 0 && doc.tokens[i - 1].sentence_index == sent) ? long(i) - 1 : -1;
    cache.next[i] =
        (i + 1 < n && doc.tokens[i + 1].sentence_index == sent) ? long(i) + 1 : -1;
  }
  for (size_t i = 0; i < n; ++i) {
    auto ctx = cache.context.row(i);
    const long slots[3] = {cache.prev[i], long(i), cache.next[i]};
    for (size_t s = 0; s < 3; ++s) {
      if (slots[s] < 0) continue;
      auto emb = params.embedding.row(cache.ids[slots[s]]);
      std::copy(emb.begin(), emb.end(), ctx.begin() + s * d_emb);
    }
    auto pre = cache.pre.row(i);
    MatVec(params.w_ctx, ctx, pre);
    auto out = cache.out.row(i);
    for (size_t k = 0; k < d_enc; ++k) {
      pre[k] += params.b_ctx(k, 0);
      out[k] = Gelu(pre[k]);
    }
  }
  return cache;
}

Tensor2 Encode(const Document &doc, const EncoderParams &params,
               const Vocab &vocab) {
  return EncodeWithCache(doc, params, vocab).out;
}

void EncodeBackward(const EncoderCache &cache, const EncoderParams &params,
                    const Tensor2 &d_out, Tensor2 &d_embedding, Tensor2 &d_w_ctx,
                    Tensor2 &d_b_ctx) {
  const size_t n = cache.out.rows();
  const size_t d_enc = cache.out.cols();
  const size_t d_emb = params.embedding.cols();
  std::vector<double> d_pre(d_enc);
  std::vector<double> d_ctx(3 * d_emb);
  for (size_t i = 0; i < n; ++i) {
    bool any = false;
    for (size_t k = 0; k < d_enc; ++k) {
      d_pre[k] = d_out(i, k) * GeluGrad(cache.pre(i, k));
      any = any || d_pre[k] != 0.0;
    }
    if (!any) continue;
    auto ctx = cache.context.row(i);
    for (size_t k = 0; k < d_enc; ++k) {
      d_b_ctx(k, 0) += d_pre[k];
      auto gw = d_w_ctx.row(k);
      for (size_t c = 0; c < ctx.size(); ++c) gw[c] += d_pre[k] * ctx[c];
    }
    std::fill(d_ctx.begin(), d_ctx.end(), 0.0);
    MatTVecAdd(params.w_ctx, d_pre, d_ctx);
    const long slots[3] = {cache.prev[i], long(i), cache.next[i]};
    for (size_t s = 0; s < 3; ++s) {
      if (slots[s] < 0) continue;
      auto ge = d_embedding.row(cache.ids[slots[s]]);
      for (size_t c = 0; c < d_emb; ++c) ge[c] += d_ctx[s * d_emb + c];
    }
  }
}

}  // namespace lingmess
