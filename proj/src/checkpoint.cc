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


#include "lingmess/checkpoint.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lingmess {

using nlohmann::ordered_json;

std::string SerializeCheckpoint(const Model &model) {
  ordered_json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["config"] = ToJson(model.config());
  j["vocab"] = model.vocab().entries();
  ordered_json params = ordered_json::array();
  const auto &store = model.store();
  for (size_t i = 0; i < store.size(); ++i) {
    const auto &t = store.value(i);
    for (double v : t.data()) {
      if (!std::isfinite(v)) {
        throw CheckpointError("tensor " + store.name(i) + " has a non-finite entry");
      }
    }
    ordered_json p;
    p["name"] = store.name(i);
    p["rows"] = t.rows();
    p["cols"] = t.cols();
    p["data"] = std::vector<double>(t.data().begin(), t.data().end());
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

Model DeserializeCheckpoint(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw CheckpointError("unsupported checkpoint format_version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kCheckpointFormatVersion) + ")");
    }
    TrainConfig cfg;
    ApplyJson(j.at("config"), cfg);
    Vocab vocab = Vocab::FromEntries(j.at("vocab").get<std::vector<std::string>>());
    ParamStore store;
    for (const auto &p : j.at("params")) {
      const auto rows = p.at("rows").get<size_t>();
      const auto cols = p.at("cols").get<size_t>();
      const auto data = p.at("data").get<std::vector<double>>();
      const auto name = p.at("name").get<std::string>();
      if (data.size() != rows * cols) {
        throw CheckpointError("tensor " + name + ": data length does not match shape");
      }
      Tensor2 t(rows, cols);
      std::copy(data.begin(), data.end(), t.data().begin());
      store.Add(name, std::move(t));
    }
    return Model::FromStore(cfg, std::move(vocab), std::move(store));
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw CheckpointError(std::string("invalid checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Model &model, const std::string &path) {
  const std::string text = SerializeCheckpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out << text;
  if (!out) throw CheckpointError("write failed: " + path);
}

Model LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str());
}

}  // namespace lingmess
