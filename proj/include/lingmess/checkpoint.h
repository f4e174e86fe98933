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


// Model persistence: one JSON document holding the format version, the
// training config, the vocabulary and every tensor (name, shape, row-major
// data). Doubles are written in shortest round-trip form, so
// save -> load -> save reproduces the same bytes.

#ifndef LINGMESS_CHECKPOINT_H_
#define LINGMESS_CHECKPOINT_H_

#include <stdexcept>
#include <string>

#include "lingmess/model.h"

namespace lingmess {

inline constexpr int kCheckpointFormatVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string SerializeCheckpoint(const Model &model);
Model DeserializeCheckpoint(const std::string &text);

void SaveCheckpoint(const Model &model, const std::string &path);
Model LoadCheckpoint(const std::string &path);

}  // namespace lingmess

#endif  // LINGMESS_CHECKPOINT_H_
