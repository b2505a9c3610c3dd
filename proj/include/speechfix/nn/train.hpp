// Copyright 2026 The SpeechFix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "speechfix/matrix.hpp"
#include "speechfix/nn/masknet.hpp"
#include "speechfix/nn/optimizer.hpp"

namespace speechfix::nn {

struct TrainConfig {
  int steps = 2000;
  double eps = 1e-8;  // the epsilon of the multiplicative mask
  AdamConfig adam;
  // Called with (step, loss) when set; keeps the loop silent otherwise.
  std::function<void(int, double)> on_step;
};

// Yields the (X_mel, S_mel) pair for a step index, both (frames x mels) in
// linear magnitude. Indexing by step keeps runs reproducible regardless of
// how the pairs are produced.
using PairStream = std::function<std::pair<Matrix, Matrix>(int)>;

struct TrainResult {
  std::vector<double> loss_history;
};

// Minimizes the mean absolute error between mask .* (X_mel + eps) and S_mel.
// Throws if the loss goes non-finite.
TrainResult train(MaskNet& net, const PairStream& stream, const TrainConfig& config);

// Versioned binary checkpoint: magic, JSON header with the architecture and
// named parameter shapes, then raw little-endian doubles.
void save_checkpoint(const std::string& path, MaskNet& net,
                     const nlohmann::json& extra = nlohmann::json::object());
MaskNet load_checkpoint(const std::string& path, nlohmann::json* extra = nullptr);

}  // namespace speechfix::nn
