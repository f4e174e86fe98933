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


#include "lingmess/diagnostics.h"

#include <map>

#include "lingmess/categorizer.h"
#include "lingmess/encoder.h"
#include "lingmess/training.h"

namespace lingmess {

using nlohmann::ordered_json;

ordered_json TablesJson() {
  std::map<int, std::vector<std::string>> groups;
  for (const auto &[pronoun, group] : PronounTable()) groups[group].push_back(pronoun);
  ordered_json g = ordered_json::object();
  size_t count = 0;
  for (const auto &[id, words] : groups) {
    g[std::to_string(id)] = words;
    count += words.size();
  }
  ordered_json j;
  j["pronoun_groups"] = g;
  j["num_pronouns"] = count;
  j["stop_words"] = std::vector<std::string>(StopWords().begin(), StopWords().end());
  return j;
}

ordered_json ToJson(const PairScoreBreakdown &b) {
  ordered_json j;
  j["null_antecedent"] = b.null_antecedent;
  j["category"] = std::string(CategoryName(b.category));
  j["f_m_c"] = b.f_m_c;
  j["f_m_q"] = b.f_m_q;
  j["f_a_shared"] = b.f_a_shared;
  j["f_a_expert"] = b.f_a_expert;
  ordered_json experts = ordered_json::object();
  for (Category t : kAllCategories) {
    experts[std::string(CategoryName(t))] = b.f_a_experts[Index(t)];
  }
  j["f_a_experts"] = experts;
  j["total"] = b.total;
  return j;
}

Document GradCheckDocument() {
  return MakeDocument("gradcheck",
                      {{"John", "Smith", "met", "her"}, {"She", "paid", "Smith", "him"}},
                      {{{0, 1}, {6, 6}, {7, 7}}, {{3, 3}, {4, 4}}});
}

TrainConfig GradCheckConfig() {
  TrainConfig cfg;
  cfg.d_emb = 4;
  cfg.d_enc = 4;
  cfg.d_hidden = 4;
  cfg.top_lambda = 1.0;
  cfg.max_span_width = 2;
  cfg.seed = 38;
  return cfg;
}

GradCheckResult GradCheckModel(Model &model, const Document &doc,
                               const TrainConfig &cfg, double eps) {
  const auto spans = EnumerateSpans(doc, cfg.max_span_width);
  const LossFunction loss = [&](ParamStore &store, bool compute_grad) {
    if (!compute_grad) return TotalLoss(doc, model, cfg, nullptr, &spans).total;
    auto buffer = store.ZeroGradsLike();
    const double value = TotalLoss(doc, model, cfg, &buffer, &spans).total;
    store.ZeroGrad();
    store.AccumulateGrad(buffer);
    return value;
  };
  return CheckGradients(model.store(), loss, eps);
}

GradCheckResult RunGradCheck(const TrainConfig &cfg, double eps) {
  const Document doc = GradCheckDocument();
  Model model = Model::Initialize(cfg, Vocab::Build({doc}, 1));
  return GradCheckModel(model, doc, cfg, eps);
}

}  // namespace lingmess
