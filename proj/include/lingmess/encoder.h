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

// Word-level contextual encoder: one window-3 mixing layer over embeddings,
//   x_i = GeLU(W_ctx [e_{i-1}; e_i; e_{i+1}] + b_ctx),
// with zero vectors for neighbours outside the token's sentence.

#ifndef LINGMESS_ENCODER_H_
#define LINGMESS_ENCODER_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "lingmess/corpus.h"
#include "lingmess/numerics.h"

namespace lingmess {

class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;

  // Only the reserved entries.
  Vocab();
  // Lowercased types with count >= min_count, by descending count then
  // ascending string, after the reserved ids.
  static Vocab Build(const std::vector<Document> &docs, int min_count);
  // Restores a vocabulary from its id-ordered entries (reserved included).
  static Vocab FromEntries(std::vector<std::string> entries);

  int Id(std::string_view word) const;
  size_t size() const { return entries_.size(); }
  const std::vector<std::string> &entries() const { return entries_; }
  bool operator==(const Vocab &other) const { return entries_ == other.entries_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> ids_;
};

struct EncoderParams {
  const Tensor2 &embedding;  // |V| x d_emb
  const Tensor2 &w_ctx;      // d_enc x 3 d_emb
  const Tensor2 &b_ctx;      // d_enc x 1
};

// Forward state kept for the backward pass.
struct EncoderCache {
  std::vector<int> ids;
  std::vector<long> prev;  // index of left neighbour in sentence, or -1
  std::vector<long> next;  // index of right neighbour in sentence, or -1
  Tensor2 context;         // n x 3 d_emb
  Tensor2 pre;             // n x d_enc
  Tensor2 out;             // n x d_enc
};

EncoderCache EncodeWithCache(const Document &doc, const EncoderParams &params,
                             const Vocab &vocab);

// Token vectors x_1..x_n as an n x d_enc matrix.
Tensor2 Encode(const Document &doc, const EncoderParams &params,
               const Vocab &vocab);

// Given d(loss)/d(out), accumulates into the three parameter gradients.
void EncodeBackward(const EncoderCache &cache, const EncoderParams &params,
                    const Tensor2 &d_out, Tensor2 &d_embedding, Tensor2 &d_w_ctx,
                    Tensor2 &d_b_ctx);

}  // namespace lingmess

#endif  // LINGMESS_ENCODER_H_
