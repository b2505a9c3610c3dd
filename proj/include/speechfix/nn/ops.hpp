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

// Per-channel running statistics for batch normalization (buffers, not
// trained parameters).
struct BnStats {
  std::vector<double> mean;
  std::vector<double> var;

  explicit BnStats(int channels = 0)
      : mean(static_cast<std::size_t>(channels), 0.0),
        var(static_cast<std::size_t>(channels), 1.0) {}
};

// Same-size convolution: x (N,C,H,W), w (Cout,Cin,kh,kw) with odd kernel
// dims, b (Cout). Stride 1, zero padding (kh/2, kw/2).
TensorPtr conv2d(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);

// Frequency-axis upsampling by 2: x (N,Cin,H,W), w (Cin,Cout,2), b (Cout)
// -> (N,Cout,2H,W). Transposed convolution with kernel (2,1), stride (2,1).
TensorPtr conv_transpose_freq2(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);

// Frequency-axis average pooling by 2; H must be even.
TensorPtr avg_pool_freq2(const TensorPtr& x);

// Batch normalization over (N,H,W) per channel. In training mode batch
// statistics normalize and update the running buffers (momentum 0.99); in
// eval mode the running buffers normalize.
TensorPtr batch_norm(const TensorPtr& x, const TensorPtr& gamma, const TensorPtr& beta,
                     BnStats& running, bool training, double momentum = 0.99,
                     double eps = 1e-5);

TensorPtr leaky_relu(const TensorPtr& x, double slope = 0.01);
TensorPtr softplus(const TensorPtr& x);
TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
TensorPtr concat_channels(const TensorPtr& a, const TensorPtr& b);

// Mean absolute difference over all entries; the subgradient at exact ties
// is 0.
TensorPtr mae_loss(const TensorPtr& a, const TensorPtr& b);

// sum_i weights[i] * t[i]; a scalar probe for gradient checks.
TensorPtr weighted_sum(const TensorPtr& t, const std::vector<double>& weights);

}  // namespace speechfix::nn
