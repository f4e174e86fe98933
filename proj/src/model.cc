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

#include "lingmess/model.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace lingmess {

namespace {

struct TensorSpec {
  std::string name;
  size_t rows, cols;
  size_t fan_in;
  uint64_t stream;
};

std::string HeadPrefix(size_t head) {
  if (head == 0) return "shared";
  return "expert_" + std::string(CategorySlug(kAllCategories[head - 1]));
}

// The full tensor list in store order. `stream` is the component's RNG
// stream: 0 encoder, 1 mention head, 2 shared head, 3 + t expert t.
std::vector<TensorSpec> Specs(const TrainConfig &cfg, size_t vocab_size) {
  const size_t e = cfg.d_emb, d = cfg.d_enc, h = cfg.d_hidden;
  std::vector<TensorSpec> specs = {
      {"encoder/embedding", vocab_size, e, 1, 0},  // one-hot input
      {"encoder/w_ctx", d, 3 * e, 3 * e, 0},
      {"encoder/b_ctx", d, 1, 3 * e, 0},
      {"mention/w_start", h, d, d, 1},
      {"mention/w_end", h, d, d, 1},
      {"mention/v_start", h, 1, h, 1},
      {"mention/v_end", h, 1, h, 1},
      {"mention/b", h, h, h, 1},
  };
  for (size_t head = 0; head < DocumentScorer::kNumHeads; ++head) {
    const std::string p = HeadPrefix(head);
    const uint64_t stream = 2 + head;
    for (const char *w : {"w_start", "w_end"}) specs.push_back({p + "/" + w, h, d, d, stream});
    for (const char *b : {"b_ss", "b_es", "b_se", "b_ee"}) {
      specs.push_back({p + "/" + b, h, h, h, stream});
    }
  }
  return specs;
}

ModelLayout LayoutFor(const ParamStore &store) {
  auto at = [&](const std::string &name) {
    auto i = store.Find(name);
    if (!i) throw std::invalid_argument("model: missing tensor " + name);
    return *i;
  };
  auto head = [&](size_t k) {
    const std::string p = HeadPrefix(k);
    return HeadLayout{at(p + "/w_start"), at(p + "/w_end"), at(p + "/b_ss"),
                      at(p + "/b_es"),    at(p + "/b_se"),  at(p + "/b_ee")};
  };
  ModelLayout l;
  l.embedding = at("encoder/embedding");
  l.w_ctx = at("encoder/w_ctx");
  l.b_ctx = at("encoder/b_ctx");
  l.m_w_start = at("mention/w_start");
  l.m_w_end = at("mention/w_end");
  l.m_v_start = at("mention/v_start");
  l.m_v_end = at("mention/v_end");
  l.m_b = at("mention/b");
  l.shared = head(0);
  for (size_t t = 0; t < kNumCategories; ++t) l.experts[t] = head(t + 1);
  return l;
}

AntecedentHeadParams HeadView(const ParamStore &s, const HeadLayout &h) {
  return {s.value(h.w_start), s.value(h.w_end), s.value(h.b_ss),
          s.value(h.b_es),    s.value(h.b_se),  s.value(h.b_ee)};
}

AntecedentHeadGrads HeadGrads(std::vector<Tensor2> &g, const HeadLayout &h) {
  return {g[h.w_start], g[h.w_end], g[h.b_ss], g[h.b_es], g[h.b_se], g[h.b_ee]};
}

}  // namespace

Model Model::Initialize(const TrainConfig &cfg, Vocab vocab) {
  cfg.Validate();
  ParamStore store;
  std::vector<SplitMix64> streams;
  for (uint64_t s = 0; s < 2 + DocumentScorer::kNumHeads; ++s) {
    streams.emplace_back(DeriveSeed(cfg.seed, s));
  }
  for (const auto &spec : Specs(cfg, vocab.size())) {
    Tensor2 t(spec.rows, spec.cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
    auto &rng = streams[spec.stream];
    for (double &v : t.data()) v = rng.Uniform(-bound, bound);
    store.Add(spec.name, std::move(t));
  }
  ModelLayout layout = LayoutFor(store);
  return Model(cfg, std::move(vocab), std::move(store), layout);
}

Model Model::FromStore(const TrainConfig &cfg, Vocab vocab, ParamStore store) {
  cfg.Validate();
  const auto specs = Specs(cfg, vocab.size());
  if (store.size() != specs.size()) {
    throw std::invalid_argument("model: expected " + std::to_string(specs.size()) +
                                " tensors, got " + std::to_string(store.size()));
  }
  for (size_t i = 0; i < specs.size(); ++i) {
    const auto &v = store.value(i);
    if (store.name(i) != specs[i].name || v.rows() != specs[i].rows ||
        v.cols() != specs[i].cols) {
      throw std::invalid_argument("model: tensor " + std::to_string(i) + " (" +
                                  store.name(i) + ") does not match " +
                                  specs[i].name);
    }
  }
  ModelLayout layout = LayoutFor(store);
  return Model(cfg, std::move(vocab), std::move(store), layout);
}

EncoderParams Model::Encoder() const {
  return {store_.value(layout_.embedding), store_.value(layout_.w_ctx),
          store_.value(layout_.b_ctx)};
}

ScorerParams Model::Scorers() const {
  ScorerParams p{
      {store_.value(layout_.m_w_start), store_.value(layout_.m_w_end),
       store_.value(layout_.m_v_start), store_.value(layout_.m_v_end),
       store_.value(layout_.m_b)},
      HeadView(store_, layout_.shared),
      {}};
  for (const auto &h : layout_.experts) p.experts.push_back(HeadView(store_, h));
  return p;
}

ScorerGrads Model::ScorerGradsIn(const ModelLayout &l, std::vector<Tensor2> &g) {
  ScorerGrads out{{g[l.m_w_start], g[l.m_w_end], g[l.m_v_start], g[l.m_v_end],
                   g[l.m_b]},
                  HeadGrads(g, l.shared),
                  {}};
  for (const auto &h : l.experts) out.experts.push_back(HeadGrads(g, h));
  return out;
}

std::vector<size_t> Model::ExpertParams(Category t) const {
  const auto &h = layout_.experts[Index(t)];
  return {h.w_start, h.w_end, h.b_ss, h.b_es, h.b_se, h.b_ee};
}

}  // namespace lingmess
