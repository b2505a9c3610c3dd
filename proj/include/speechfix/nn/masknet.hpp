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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "speechfix/dsp/mel.hpp"
#include "speechfix/matrix.hpp"
#include "speechfix/nn/ops.hpp"
#include "speechfix/nn/tensor.hpp"
#include "speechfix/rng.hpp"

namespace speechfix::nn {

// Pre-activation residual unit: two (BN -> leaky ReLU -> 3x3 conv) stages
// plus a shortcut, projected through a 1x1 conv when the channel count
// changes.
struct ResUnit {
  int in_channels = 0;
  int out_channels = 0;
  TensorPtr bn1_gamma, bn1_beta, conv1_w, conv1_b;
  TensorPtr bn2_gamma, bn2_beta, conv2_w, conv2_b;
  TensorPtr proj_w, proj_b;  // present only when in_channels != out_channels
  BnStats bn1_stats, bn2_stats;

  void init(int in_c, int out_c, Rng& rng);
  TensorPtr forward(const TensorPtr& x, bool training);
  void collect(const std::string& prefix,
               std::vector<std::pair<std::string, TensorPtr>>& params,
               std::vector<std::pair<std::string, BnStats*>>& buffers);
};

// UNet-style mel mask estimator. Encoder blocks halve the mel axis via
// average pooling, decoder blocks restore it with transposed convolutions
// and concatenated skip connections; the time axis is never resampled, so
// any frame count works. The head's softplus keeps the mask non-negative,
// with bias ln(e-1) so a fresh net emits a mask near 1.
class MaskNet {
 public:
  MaskNet(int num_mels, int base_width, int blocks, std::uint64_t seed);

  // x is (N, 1, num_mels, frames) holding linear mel magnitudes; the net
  // applies log1p compression internally. Returns the mask, same shape.
  TensorPtr forward(const TensorPtr& x, bool training);

  // Convenience around forward() for a (frames x num_mels) matrix, eval
  // mode. Errors when the mel width does not match the net.
  Matrix forward_mask(const Matrix& mel_frames);

  std::vector<TensorPtr> parameters() const;
  std::vector<std::pair<std::string, TensorPtr>> named_parameters() const;
  std::vector<std::pair<std::string, BnStats*>> named_buffers();

  int num_mels() const { return num_mels_; }
  int base_width() const { return base_; }
  int blocks() const { return blocks_; }

 private:
  int num_mels_ = 0;
  int base_ = 0;
  int blocks_ = 0;
  std::vector<ResUnit> enc_;
  ResUnit mid_;
  std::vector<ResUnit> dec_;        // dec_[i] pairs with enc_[i]
  std::vector<TensorPtr> up_w_, up_b_;
  TensorPtr head_w_, head_b_;
};

// mask .* (x + eps), elementwise.
Matrix apply_mask(const Matrix& mask, const Matrix& x, double eps);

// Runs the net on X_mel and applies the predicted mask in the linear mel
// domain.
dsp::MelSpectrogram restore_mel(MaskNet& net, const dsp::MelSpectrogram& x_mel,
                                double eps = 1e-8);

}  // namespace speechfix::nn
