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

#include "speechfix/dsp/mel.hpp"

#include <cmath>
#include <stdexcept>

namespace speechfix::dsp {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank build_mel_filterbank(int sample_rate, int fft_size, int num_mels) {
  if (num_mels < 1) throw std::invalid_argument("build_mel_filterbank: num_mels must be >= 1");
  if (fft_size <= 0 || fft_size % 2 != 0)
    throw std::invalid_argument("build_mel_filterbank: fft_size must be even and positive");
  if (sample_rate <= 0) throw std::invalid_argument("build_mel_filterbank: bad sample_rate");

  const int num_bins = fft_size / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);

  // num_mels + 2 equally spaced mel points, snapped to FFT bins. Snapping is
  // what makes every filter peak at exactly 1.0 on the grid.
  std::vector<int> edges(static_cast<std::size_t>(num_mels) + 2);
  for (int i = 0; i < num_mels + 2; ++i) {
    const double mel = mel_max * i / (num_mels + 1);
    const double hz = mel_to_hz(mel);
    edges[i] = static_cast<int>(std::lround(hz * fft_size / sample_rate));
  }
  for (int k = 1; k <= num_mels; ++k) {
    if (k + 1 <= num_mels && edges[k] >= edges[k + 1])
      throw std::invalid_argument("build_mel_filterbank: degenerate filterbank (mel centers collide on the FFT grid)");
    if (edges[k - 1] >= edges[k + 1])
      throw std::invalid_argument("build_mel_filterbank: degenerate filterbank (empty band)");
  }

  MelFilterbank fb;
  fb.sample_rate = sample_rate;
  fb.fft_size = fft_size;
  fb.num_mels = num_mels;
  fb.edge_bins = edges;
  fb.weights = Matrix(num_bins, num_mels);

  for (int k = 0; k < num_mels; ++k) {
    const int left = edges[k], center = edges[k + 1], right = edges[k + 2];
    for (int b = left; b <= right && b < num_bins; ++b) {
      double w;
      if (b == center) {
        w = 1.0;
      } else if (b < center) {
        w = center > left ? static_cast<double>(b - left) / (center - left) : 0.0;
      } else {
        w = right > center ? static_cast<double>(right - b) / (right - center) : 0.0;
      }
      if (w > 0.0) fb.weights.at(b, k) = w;
    }
  }
  return fb;
}

Matrix mel_project(const Matrix& magnitude, const MelFilterbank& fb) {
  if (magnitude.cols != fb.weights.rows)
    throw std::invalid_argument("mel_project: magnitude bins do not match filterbank rows");
  const int num_bins = fb.weights.rows;
  Matrix out(magnitude.rows, fb.num_mels);
  // Each filter only touches bins inside its triangle, so walk filters
  // rather than the full dense product.
  for (int t = 0; t < magnitude.rows; ++t) {
    const double* m = magnitude.row(t);
    double* o = out.row(t);
    for (int k = 0; k < fb.num_mels; ++k) {
      const int left = fb.edge_bins[k];
      const int right = std::min(fb.edge_bins[k + 2], num_bins - 1);
      double acc = 0.0;
      for (int b = left; b <= right; ++b) acc += m[b] * fb.weights.at(b, k);
      o[k] = acc;
    }
  }
  return out;
}

MelSpectrogram apply_mel(const Spectrogram& spec, const MelFilterbank& fb) {
  MelSpectrogram mel;
  mel.frames = mel_project(magnitude(spec), fb);
  mel.fft_size = spec.fft_size;
  mel.hop = spec.hop;
  mel.sample_rate = spec.sample_rate;
  return mel;
}

}  // namespace speechfix::dsp
