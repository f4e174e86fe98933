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

#include "lingmess/config.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lingmess {

std::string_view RoutingModeName(RoutingMode mode) {
  switch (mode) {
    case RoutingMode::kLinguistic: return "linguistic";
    case RoutingMode::kRandom: return "random";
    case RoutingMode::kSharedOnly: return "shared_only";
    case RoutingMode::kExpertsOnly: return "experts_only";
  }
  return "?";
}

RoutingMode ParseRoutingMode(std::string_view name) {
  for (auto mode : {RoutingMode::kLinguistic, RoutingMode::kRandom,
                    RoutingMode::kSharedOnly, RoutingMode::kExpertsOnly}) {
    if (name == RoutingModeName(mode)) return mode;
  }
  throw std::invalid_argument("unknown routing mode: " + std::string(name));
}

std::string_view LossModeName(LossMode mode) {
  return mode == LossMode::kFull ? "full" : "coref_only";
}

LossMode ParseLossMode(std::string_view name) {
  if (name == "full") return LossMode::kFull;
  if (name == "coref_only") return LossMode::kCorefOnly;
  throw std::invalid_argument("unknown loss mode: " + std::string(name));
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string &what) {
    throw std::invalid_argument("invalid config: " + what);
  };
  if (!(top_lambda > 0.0 && top_lambda <= 1.0)) fail("top_lambda must be in (0,1]");
  if (max_span_width < 1) fail("max_span_width must be positive");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be non-negative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must be in [0,1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must be in [0,1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be positive");
  if (epochs < 0) fail("epochs must be non-negative");
  if (token_budget_train < 1) fail("token_budget_train must be positive");
  if (token_budget_eval < 1) fail("token_budget_eval must be positive");
  if (d_emb < 1 || d_enc < 1 || d_hidden < 1) fail("dimensions must be positive");
  if (min_count < 0) fail("min_count must be non-negative");
}

const std::vector<std::string> &ConfigKeys() {
  static const auto *keys = new std::vector<std::string>{
      "top_lambda",        "max_span_width",     "learning_rate",
      "adam_beta1",        "adam_beta2",         "adam_eps",
      "epochs",            "token_budget_train", "token_budget_eval",
      "seed",              "d_emb",              "d_enc",
      "d_hidden",          "min_count",          "routing_mode",
      "loss_mode"};
  return *keys;
}

nlohmann::ordered_json ToJson(const TrainConfig &cfg) {
  nlohmann::ordered_json j;
  j["top_lambda"] = cfg.top_lambda;
  j["max_span_width"] = cfg.max_span_width;
  j["learning_rate"] = cfg.learning_rate;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["epochs"] = cfg.epochs;
  j["token_budget_train"] = cfg.token_budget_train;
  j["token_budget_eval"] = cfg.token_budget_eval;
  j["seed"] = cfg.seed;
  j["d_emb"] = cfg.d_emb;
  j["d_enc"] = cfg.d_enc;
  j["d_hidden"] = cfg.d_hidden;
  j["min_count"] = cfg.min_count;
  j["routing_mode"] = std::string(RoutingModeName(cfg.routing_mode));
  j["loss_mode"] = std::string(LossModeName(cfg.loss_mode));
  return j;
}

void ApplyJson(const nlohmann::json &j, TrainConfig &cfg) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto &[key, value] : j.items()) {
    if (value.is_string()) {
      SetConfigValue(cfg, key, value.get<std::string>());
    } else {
      SetConfigValue(cfg, key, value.dump());
    }
  }
}

namespace {

template <typename T>
T ParseNumber(std::string_view key, const std::string &value) {
  std::istringstream ss(value);
  T out{};
  ss >> out;
  if (ss.fail() || !ss.eof()) {
    throw std::invalid_argument("invalid value for " + std::string(key) + ": " +
                                value);
  }
  return out;
}

}  // namespace

void SetConfigValue(TrainConfig &cfg, std::string_view key,
                    const std::string &value) {
  if (key == "top_lambda") cfg.top_lambda = ParseNumber<double>(key, value);
  else if (key == "max_span_width") cfg.max_span_width = ParseNumber<int>(key, value);
  else if (key == "learning_rate") cfg.learning_rate = ParseNumber<double>(key, value);
  else if (key == "adam_beta1") cfg.adam_beta1 = ParseNumber<double>(key, value);
  else if (key == "adam_beta2") cfg.adam_beta2 = ParseNumber<double>(key, value);
  else if (key == "adam_eps") cfg.adam_eps = ParseNumber<double>(key, value);
  else if (key == "epochs") cfg.epochs = ParseNumber<int>(key, value);
  else if (key == "token_budget_train") cfg.token_budget_train = ParseNumber<int>(key, value);
  else if (key == "token_budget_eval") cfg.token_budget_eval = ParseNumber<int>(key, value);
  else if (key == "seed") cfg.seed = ParseNumber<uint64_t>(key, value);
  else if (key == "d_emb") cfg.d_emb = ParseNumber<int>(key, value);
  else if (key == "d_enc") cfg.d_enc = ParseNumber<int>(key, value);
  else if (key == "d_hidden") cfg.d_hidden = ParseNumber<int>(key, value);
  else if (key == "min_count") cfg.min_count = ParseNumber<int>(key, value);
  else if (key == "routing_mode") cfg.routing_mode = ParseRoutingMode(value);
  else if (key == "loss_mode") cfg.loss_mode = ParseLossMode(value);
  else throw std::invalid_argument("unknown config key: " + std::string(key));
}

TrainConfig LoadConfigFile(const std::string &path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    ApplyJson(nlohmann::json::parse(text), base);
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) {
        throw std::invalid_argument("config line without '=': " + line);
      }
      SetConfigValue(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  base.Validate();
  return base;
}

}  // namespace lingmess
