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


// Audit helpers shared by the command-line tool, the tests and the Python
// module.

#ifndef LINGMESS_DIAGNOSTICS_H_
#define LINGMESS_DIAGNOSTICS_H_

#include "json.hpp"
#include "lingmess/config.h"
#include "lingmess/corpus.h"
#include "lingmess/model.h"
#include "lingmess/numerics.h"
#include "lingmess/scorers.h"

namespace lingmess {

// Pronoun groups and stop words, keys and values sorted.
nlohmann::ordered_json TablesJson();

nlohmann::ordered_json ToJson(const PairScoreBreakdown &b);

// The bundled 8-token document and its config (d_emb = d_enc = d_hidden = 4).
// kGradCheckEps is the default finite-difference step for it.
Document GradCheckDocument();
TrainConfig GradCheckConfig();
inline constexpr double kGradCheckEps = 3e-4;

// Checks TotalLoss gradients for every model tensor on doc, with every
// enumerated span kept as a mention so the loss has no pruning jumps.
GradCheckResult GradCheckModel(Model &model, const Document &doc,
                               const TrainConfig &cfg, double eps);
// Same, for a fresh model built from cfg on the bundled document.
GradCheckResult RunGradCheck(const TrainConfig &cfg, double eps);

}  // namespace lingmess

#endif  // LINGMESS_DIAGNOSTICS_H_
