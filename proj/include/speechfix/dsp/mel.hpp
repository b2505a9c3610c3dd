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

#ifndef SPEECHFIX_DSP_MEL_HPP
#define SPEECHFIX_DSP_MEL_HPP

#include <vector>

#include "speechfix/dsp/stft.hpp"
#include "speechfix/matrix.hpp"

namespace speechfix::dsp {

// Triangular mel filterbank, (num_bins x num_mels). Triangles are laid out on
// the FFT bin grid so every filter peaks at exactly 1.0; columns are not
// divided by band width, which keeps high-frequency bands recoverable from
// the mel projection.
struct MelFilterbank {
  Matrix weights;
  int sample_rate = 0;
  int fft_size = 0;
  int num_mels = 0;
  // Bin indices of the num_mels + 2 triangle edge points; filter k spans
  // (edge_bins[k], edge_bins[k+2]) and peaks at edge_bins[k+1].
  std::vector<int> edge_bins;
};

struct MelSpectrogram {
  Matrix frames;  // (num_frames x num_mels), non-negative
  int fft_size = 0;
  int hop = 0;
  int sample_rate = 0;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

MelFilterbank build_mel_filterbank(int sample_rate, int fft_size, int num_mels);

// magnitude (num_frames x num_bins) * weights (num_bins x num_mels).
Matrix mel_project(const Matrix& magnitude, const MelFilterbank& fb);

MelSpectrogram apply_mel(const Spectrogram& spec, const MelFilterbank& fb);

}  // namespace speechfix::dsp

#endif  // SPEECHFIX_DSP_MEL_HPP
