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

#include "speechfix/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace speechfix::nn {

Adam::Adam(std::vector<TensorPtr> params, AdamConfig config)
    : params_(std::move(params)), cfg_(config) {
  if (cfg_.warmup_steps < 1) throw std::invalid_argument("warmup_steps must be >= 1");
  if (cfg_.decay_interval < 1) throw std::invalid_argument("decay_interval must be >= 1");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

double Adam::effective_lr(int t) const {
  if (t <= cfg_.warmup_steps)
    return cfg_.lr * static_cast<double>(t) / cfg_.warmup_steps;
  const int decays = (t - cfg_.warmup_steps) / cfg_.decay_interval;
  return cfg_.lr * std::pow(cfg_.decay, decays);
}

void Adam::step() {
  ++t_;
  const double lr = effective_lr(t_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = *params_[i];
    p.ensure_grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double g = p.g[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p.v[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (const auto& p : params_) p->zero_grad();
}

}  // namespace speechfix::nn
