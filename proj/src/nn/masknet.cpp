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

#include "speechfix/nn/masknet.hpp"

#include <cmath>
#include <stdexcept>

namespace speechfix::nn {

namespace {

TensorPtr he_uniform(std::vector<int> shape, int fan_in, Rng& rng, double scale = 1.0) {
  auto t = make_tensor(std::move(shape), true);
  const double bound = std::sqrt(6.0 / fan_in) * scale;
  for (auto& v : t->v) v = rng.uniform(-bound, bound);
  return t;
}

TensorPtr zeros_param(std::vector<int> shape, double fill = 0.0) {
  auto t = make_tensor(std::move(shape), true);
  for (auto& v : t->v) v = fill;
  return t;
}

// log(1 + x); dynamic-range compression applied to the net input only, the
// mask itself acts in the linear mel domain.
TensorPtr log1p_compress(const TensorPtr& x) {
  auto out = make_tensor(x->shape);
  out->parents = {x};
  for (std::size_t i = 0; i < x->size(); ++i) out->v[i] = std::log1p(x->v[i]);
  Tensor* raw = out.get();
  out->backprop = [raw, x]() {
    x->ensure_grad();
    for (std::size_t i = 0; i < x->size(); ++i) x->g[i] += raw->g[i] / (1.0 + x->v[i]);
  };
  return out;
}

}  // namespace

void ResUnit::init(int in_c, int out_c, Rng& rng) {
  in_channels = in_c;
  out_channels = out_c;
  bn1_gamma = zeros_param({in_c}, 1.0);
  bn1_beta = zeros_param({in_c});
  conv1_w = he_uniform({out_c, in_c, 3, 3}, in_c * 9, rng);
  conv1_b = zeros_param({out_c});
  bn2_gamma = zeros_param({out_c}, 1.0);
  bn2_beta = zeros_param({out_c});
  conv2_w = he_uniform({out_c, out_c, 3, 3}, out_c * 9, rng);
  conv2_b = zeros_param({out_c});
  bn1_stats = BnStats(in_c);
  bn2_stats = BnStats(out_c);
  if (in_c != out_c) {
    proj_w = he_uniform({out_c, in_c, 1, 1}, in_c, rng);
    proj_b = zeros_param({out_c});
  } else {
    proj_w.reset();
    proj_b.reset();
  }
}

TensorPtr ResUnit::forward(const TensorPtr& x, bool training) {
  auto h = batch_norm(x, bn1_gamma, bn1_beta, bn1_stats, training);
  h = leaky_relu(h);
  h = conv2d(h, conv1_w, conv1_b);
  h = batch_norm(h, bn2_gamma, bn2_beta, bn2_stats, training);
  h = leaky_relu(h);
  h = conv2d(h, conv2_w, conv2_b);
  auto shortcut = proj_w ? conv2d(x, proj_w, proj_b) : x;
  return add(h, shortcut);
}

void ResUnit::collect(const std::string& prefix,
                      std::vector<std::pair<std::string, TensorPtr>>& params,
                      std::vector<std::pair<std::string, BnStats*>>& buffers) {
  params.emplace_back(prefix + ".bn1.gamma", bn1_gamma);
  params.emplace_back(prefix + ".bn1.beta", bn1_beta);
  params.emplace_back(prefix + ".conv1.w", conv1_w);
  params.emplace_back(prefix + ".conv1.b", conv1_b);
  params.emplace_back(prefix + ".bn2.gamma", bn2_gamma);
  params.emplace_back(prefix + ".bn2.beta", bn2_beta);
  params.emplace_back(prefix + ".conv2.w", conv2_w);
  params.emplace_back(prefix + ".conv2.b", conv2_b);
  if (proj_w) {
    params.emplace_back(prefix + ".proj.w", proj_w);
    params.emplace_back(prefix + ".proj.b", proj_b);
  }
  buffers.emplace_back(prefix + ".bn1", &bn1_stats);
  buffers.emplace_back(prefix + ".bn2", &bn2_stats);
}

MaskNet::MaskNet(int num_mels, int base_width, int blocks, std::uint64_t seed)
    : num_mels_(num_mels), base_(base_width), blocks_(blocks) {
  if (num_mels <= 0) throw std::invalid_argument("num_mels must be positive");
  if (base_width <= 0) throw std::invalid_argument("base width must be positive");
  if (blocks < 1) throw std::invalid_argument("at least one encoder block required");
  if (num_mels % (1 << blocks) != 0)
    throw std::invalid_argument("num_mels must be divisible by 2^blocks");

  Rng rng(seed);
  enc_.resize(static_cast<std::size_t>(blocks));
  dec_.resize(static_cast<std::size_t>(blocks));
  up_w_.resize(static_cast<std::size_t>(blocks));
  up_b_.resize(static_cast<std::size_t>(blocks));

  int in_c = 1;
  for (int i = 0; i < blocks; ++i) {
    const int out_c = base_width << i;
    enc_[static_cast<std::size_t>(i)].init(in_c, out_c, rng);
    in_c = out_c;
  }
  mid_.init(in_c, base_width << blocks, rng);

  int cur = base_width << blocks;
  for (int i = blocks - 1; i >= 0; --i) {
    const int skip_c = base_width << i;
    up_w_[static_cast<std::size_t>(i)] = he_uniform({cur, skip_c, 2}, cur, rng);
    up_b_[static_cast<std::size_t>(i)] = zeros_param({skip_c});
    dec_[static_cast<std::size_t>(i)].init(2 * skip_c, skip_c, rng);
    cur = skip_c;
  }

  // Small head weights plus softplus^{-1}(1) bias make the initial mask sit
  // near 1, i.e. start from the identity restoration.
  head_w_ = he_uniform({1, base_width, 1, 1}, base_width, rng, 0.01);
  head_b_ = zeros_param({1}, std::log(std::exp(1.0) - 1.0));
}

TensorPtr MaskNet::forward(const TensorPtr& x, bool training) {
  if (!x || x->shape.size() != 4 || x->shape[1] != 1)
    throw std::invalid_argument("mask net input must be (N, 1, mels, frames)");
  if (x->shape[2] != num_mels_)
    throw std::invalid_argument("mel width mismatch: net expects " + std::to_string(num_mels_) +
                                " mels, got " + std::to_string(x->shape[2]));

  auto z = log1p_compress(x);
  std::vector<TensorPtr> skips(static_cast<std::size_t>(blocks_));
  for (int i = 0; i < blocks_; ++i) {
    z = enc_[static_cast<std::size_t>(i)].forward(z, training);
    skips[static_cast<std::size_t>(i)] = z;
    z = avg_pool_freq2(z);
  }
  z = mid_.forward(z, training);
  for (int i = blocks_ - 1; i >= 0; --i) {
    z = conv_transpose_freq2(z, up_w_[static_cast<std::size_t>(i)],
                             up_b_[static_cast<std::size_t>(i)]);
    z = concat_channels(z, skips[static_cast<std::size_t>(i)]);
    z = dec_[static_cast<std::size_t>(i)].forward(z, training);
  }
  auto mask = softplus(conv2d(z, head_w_, head_b_));
  check_finite(*mask, "mask");
  return mask;
}

Matrix MaskNet::forward_mask(const Matrix& mel_frames) {
  if (mel_frames.cols != num_mels_)
    throw std::invalid_argument("mel width mismatch: net expects " + std::to_string(num_mels_) +
                                " mels, got " + std::to_string(mel_frames.cols));
  const int frames = mel_frames.rows;
  auto x = make_tensor({1, 1, num_mels_, frames});
  for (int t = 0; t < frames; ++t)
    for (int m = 0; m < num_mels_; ++m)
      x->v[static_cast<std::size_t>(m) * frames + t] = mel_frames.at(t, m);
  auto mask = forward(x, /*training=*/false);
  Matrix out(frames, num_mels_);
  for (int t = 0; t < frames; ++t)
    for (int m = 0; m < num_mels_; ++m)
      out.at(t, m) = mask->v[static_cast<std::size_t>(m) * frames + t];
  return out;
}

std::vector<TensorPtr> MaskNet::parameters() const {
  std::vector<TensorPtr> out;
  for (const auto& [name, p] : named_parameters()) out.push_back(p);
  return out;
}

std::vector<std::pair<std::string, TensorPtr>> MaskNet::named_parameters() const {
  std::vector<std::pair<std::string, TensorPtr>> params;
  std::vector<std::pair<std::string, BnStats*>> buffers;
  auto* self = const_cast<MaskNet*>(this);
  for (int i = 0; i < blocks_; ++i)
    self->enc_[static_cast<std::size_t>(i)].collect("enc" + std::to_string(i), params, buffers);
  self->mid_.collect("mid", params, buffers);
  for (int i = blocks_ - 1; i >= 0; --i) {
    params.emplace_back("up" + std::to_string(i) + ".w", up_w_[static_cast<std::size_t>(i)]);
    params.emplace_back("up" + std::to_string(i) + ".b", up_b_[static_cast<std::size_t>(i)]);
    self->dec_[static_cast<std::size_t>(i)].collect("dec" + std::to_string(i), params, buffers);
  }
  params.emplace_back("head.w", head_w_);
  params.emplace_back("head.b", head_b_);
  return params;
}

std::vector<std::pair<std::string, BnStats*>> MaskNet::named_buffers() {
  std::vector<std::pair<std::string, TensorPtr>> params;
  std::vector<std::pair<std::string, BnStats*>> buffers;
  for (int i = 0; i < blocks_; ++i)
    enc_[static_cast<std::size_t>(i)].collect("enc" + std::to_string(i), params, buffers);
  mid_.collect("mid", params, buffers);
  for (int i = blocks_ - 1; i >= 0; --i)
    dec_[static_cast<std::size_t>(i)].collect("dec" + std::to_string(i), params, buffers);
  return buffers;
}

Matrix apply_mask(const Matrix& mask, const Matrix& x, double eps) {
  require_same_shape(mask, x, "apply_mask");
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) out.v[i] = mask.v[i] * (x.v[i] + eps);
  return out;
}

dsp::MelSpectrogram restore_mel(MaskNet& net, const dsp::MelSpectrogram& x_mel, double eps) {
  dsp::MelSpectrogram out;
  out.fft_size = x_mel.fft_size;
  out.hop = x_mel.hop;
  out.sample_rate = x_mel.sample_rate;
  out.frames = apply_mask(net.forward_mask(x_mel.frames), x_mel.frames, eps);
  return out;
}

}  // namespace speechfix::nn
