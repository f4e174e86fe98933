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

#ifndef LINGMESS_MODEL_H_
#define LINGMESS_MODEL_H_

#include <array>
#include <vector>

#include "lingmess/config.h"
#include "lingmess/encoder.h"
#include "lingmess/numerics.h"
#include "lingmess/scorers.h"

namespace lingmess {

// Indices of a model's tensors inside its ParamStore.
struct HeadLayout {
  size_t w_start, w_end, b_ss, b_es, b_se, b_ee;
};

struct ModelLayout {
  size_t embedding, w_ctx, b_ctx;
  size_t m_w_start, m_w_end, m_v_start, m_v_end, m_b;
  HeadLayout shared;
  std::array<HeadLayout, kNumCategories> experts;
};

// Encoder, mention head, shared head and six expert heads, all stored in one
// ParamStore. Tensor names are "<component>/<tensor>", e.g.
// "expert_match/b_ss".
class Model {
 public:
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization. Every component
  // draws from its own stream derived from cfg.seed; expert t uses stream
  // 3 + Index(t).
  static Model Initialize(const TrainConfig &cfg, Vocab vocab);
  // Wraps existing tensors; throws if any name or shape is off.
  static Model FromStore(const TrainConfig &cfg, Vocab vocab, ParamStore store);

  const TrainConfig &config() const { return config_; }
  TrainConfig &mutable_config() { return config_; }
  const Vocab &vocab() const { return vocab_; }
  ParamStore &store() { return store_; }
  const ParamStore &store() const { return store_; }
  const ModelLayout &layout() const { return layout_; }

  EncoderParams Encoder() const;
  ScorerParams Scorers() const;

  // Views into a gradient buffer shaped like the store (ZeroGradsLike).
  static ScorerGrads ScorerGradsIn(const ModelLayout &layout,
                                   std::vector<Tensor2> &buffer);

  // Parameter indices of one expert, for isolation tests.
  std::vector<size_t> ExpertParams(Category t) const;

 private:
  Model(TrainConfig cfg, Vocab vocab, ParamStore store, ModelLayout layout)
      : config_(std::move(cfg)),
        vocab_(std::move(vocab)),
        store_(std::move(store)),
        layout_(layout) {}

  TrainConfig config_;
  Vocab vocab_;
  ParamStore store_;
  ModelLayout layout_;
};

}  // namespace lingmess

#endif  // LINGMESS_MODEL_H_
