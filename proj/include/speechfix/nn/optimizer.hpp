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

#include <vector>

#include "speechfix/nn/tensor.hpp"

namespace speechfix::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  int warmup_steps = 1000;     // linear ramp 0 -> lr
  int decay_interval = 62500;  // steps between 0.9 decays after warmup
  double decay = 0.9;
};

// Adam with bias correction, linear warmup and stepwise decay.
class Adam {
 public:
  explicit Adam(std::vector<TensorPtr> params, AdamConfig config = {});

  // Effective learning rate at 1-based step t: ramps lr*t/warmup during
  // warmup, then multiplies by decay once per completed decay_interval.
  double effective_lr(int t) const;

  void step();
  void zero_grad();
  int step_count() const { return t_; }

 private:
  std::vector<TensorPtr> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  int t_ = 0;
};

}  // namespace speechfix::nn
