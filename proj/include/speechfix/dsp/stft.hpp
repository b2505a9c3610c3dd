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

#ifndef SPEECHFIX_DSP_STFT_HPP
#define SPEECHFIX_DSP_STFT_HPP

#include <complex>
#include <string>
#include <vector>

#include "speechfix/audio.hpp"
#include "speechfix/matrix.hpp"

namespace speechfix::dsp {

// Complex short-time spectrum, row-major (num_frames x num_bins) with
// num_bins == fft_size/2 + 1. Frames are centered: frame t covers input
// samples around t*hop after reflective padding of fft_size/2 on both ends,
// so num_frames == floor(len/hop) + 1.
struct Spectrogram {
  std::vector<std::complex<double>> frames;
  int num_frames = 0;
  int num_bins = 0;
  int fft_size = 0;
  int hop = 0;
  int sample_rate = 0;
  std::string window = "hann";

  std::complex<double>& at(int t, int k) {
    return frames[static_cast<std::size_t>(t) * num_bins + k];
  }
  std::complex<double> at(int t, int k) const {
    return frames[static_cast<std::size_t>(t) * num_bins + k];
  }
};

// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

Spectrogram stft(const AudioSegment& audio, int fft_size, int hop);

// Weighted overlap-add inverse with squared-window normalization. out_len
// trims or zero-pads the result; pass the original signal length for a
// roundtrip.
AudioSegment istft(const Spectrogram& spec, int out_len);

// |frames|, row-major (num_frames x num_bins).
Matrix magnitude(const Spectrogram& spec);

}  // namespace speechfix::dsp

#endif  // SPEECHFIX_DSP_STFT_HPP
