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

#ifndef LINGMESS_CONFIG_H_
#define LINGMESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lingmess {

enum class RoutingMode {
  kLinguistic,  // shared scorer + expert picked by Categorize
  kRandom,      // shared scorer + expert picked by CategorizeRandom
  kSharedOnly,  // shared scorer alone, trained on the shared loss alone
  kExpertsOnly, // experts alone, no shared scorer and no shared loss
};

enum class LossMode {
  kFull,       // coref + shared + one term per expert
  kCorefOnly,  // coref term alone
};

std::string_view RoutingModeName(RoutingMode mode);
RoutingMode ParseRoutingMode(std::string_view name);
std::string_view LossModeName(LossMode mode);
LossMode ParseLossMode(std::string_view name);

struct TrainConfig {
  double top_lambda = 0.4;
  int max_span_width = 10;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 10;
  int token_budget_train = 5000;
  int token_budget_eval = 10000;
  uint64_t seed = 42;
  int d_emb = 32;
  int d_enc = 32;
  int d_hidden = 64;
  int min_count = 1;
  RoutingMode routing_mode = RoutingMode::kLinguistic;
  LossMode loss_mode = LossMode::kFull;

  // Throws std::invalid_argument naming the first bad field.
  void Validate() const;
  bool operator==(const TrainConfig &) const = default;
};

// Config keys, in serialization order.
const std::vector<std::string> &ConfigKeys();

nlohmann::ordered_json ToJson(const TrainConfig &cfg);
// Unknown keys are an error; missing keys keep their current values.
void ApplyJson(const nlohmann::json &j, TrainConfig &cfg);
// Sets one field from its string form, as given on a command line or in a
// key=value file.
void SetConfigValue(TrainConfig &cfg, std::string_view key,
                    const std::string &value);
// Reads a config file: a JSON object, or one key=value pair per line with
// '#' comments.
TrainConfig LoadConfigFile(const std::string &path, TrainConfig base = {});

}  // namespace lingmess

#endif  // LINGMESS_CONFIG_H_
