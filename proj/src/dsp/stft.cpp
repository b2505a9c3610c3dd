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

#include "speechfix/dsp/stft.hpp"

#include <cmath>
#include <stdexcept>

#include "speechfix/dsp/fft.hpp"

namespace speechfix::dsp {

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(6.283185307179586476925287 * i / n);
  return w;
}

namespace {

// Reflective padding of `pad` samples on both ends (numpy "reflect": the
// boundary sample is not repeated). Requires len > pad.
std::vector<double> reflect_pad(const std::vector<double>& x, int pad) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(static_cast<std::size_t>(n) + 2 * pad);
  for (int i = 0; i < pad; ++i) out[i] = x[pad - i];
  for (int i = 0; i < n; ++i) out[pad + i] = x[i];
  for (int i = 0; i < pad; ++i) out[pad + n + i] = x[n - 2 - i];
  return out;
}

}  // namespace

Spectrogram stft(const AudioSegment& audio, int fft_size, int hop) {
  const int len = static_cast<int>(audio.samples.size());
  if (len == 0) throw std::invalid_argument("stft: empty signal");
  if (hop <= 0 || hop > fft_size) throw std::invalid_argument("stft: need 0 < hop <= fft_size");
  if (!is_power_of_two(fft_size)) throw std::invalid_argument("stft: fft_size must be a power of two");
  if (len <= fft_size / 2)
    throw std::invalid_argument("stft: signal shorter than fft_size/2 + 1 samples");

  const int pad = fft_size / 2;
  const std::vector<double> padded = reflect_pad(audio.samples, pad);
  const std::vector<double> win = hann_window(fft_size);

  Spectrogram spec;
  spec.fft_size = fft_size;
  spec.hop = hop;
  spec.sample_rate = audio.sample_rate;
  spec.num_bins = fft_size / 2 + 1;
  spec.num_frames = len / hop + 1;
  spec.frames.resize(static_cast<std::size_t>(spec.num_frames) * spec.num_bins);

  std::vector<double> frame(static_cast<std::size_t>(fft_size));
  for (int t = 0; t < spec.num_frames; ++t) {
    const int start = t * hop;
    for (int i = 0; i < fft_size; ++i) {
      const int idx = start + i;
      frame[i] = (idx < static_cast<int>(padded.size()) ? padded[idx] : 0.0) * win[i];
    }
    auto bins = rfft(frame.data(), fft_size, fft_size);
    std::copy(bins.begin(), bins.end(), spec.frames.begin() + static_cast<std::size_t>(t) * spec.num_bins);
  }
  return spec;
}

AudioSegment istft(const Spectrogram& spec, int out_len) {
  if (spec.num_frames == 0) throw std::invalid_argument("istft: empty spectrogram");
  const int fft_size = spec.fft_size;
  const int hop = spec.hop;
  const std::vector<double> win = hann_window(fft_size);

  const int padded_len = (spec.num_frames - 1) * hop + fft_size;
  std::vector<double> acc(static_cast<std::size_t>(padded_len), 0.0);
  std::vector<double> norm(static_cast<std::size_t>(padded_len), 0.0);

  std::vector<std::complex<double>> half(static_cast<std::size_t>(spec.num_bins));
  for (int t = 0; t < spec.num_frames; ++t) {
    for (int k = 0; k < spec.num_bins; ++k) half[k] = spec.at(t, k);
    const std::vector<double> frame = irfft(half, fft_size);
    const int start = t * hop;
    for (int i = 0; i < fft_size; ++i) {
      acc[start + i] += frame[i] * win[i];
      norm[start + i] += win[i] * win[i];
    }
  }

  const int pad = fft_size / 2;
  AudioSegment out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(static_cast<std::size_t>(out_len), 0.0);
  for (int i = 0; i < out_len; ++i) {
    const int j = i + pad;
    if (j >= padded_len) break;
    if (norm[j] < 1e-8)
      throw std::runtime_error("istft: window normalization envelope vanished (hop too large)");
    out.samples[i] = acc[j] / norm[j];
  }
  return out;
}

Matrix magnitude(const Spectrogram& spec) {
  Matrix m(spec.num_frames, spec.num_bins);
  for (int t = 0; t < spec.num_frames; ++t)
    for (int k = 0; k < spec.num_bins; ++k) m.at(t, k) = std::abs(spec.at(t, k));
  return m;
}

}  // namespace speechfix::dsp
