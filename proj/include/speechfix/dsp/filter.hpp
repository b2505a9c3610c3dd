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

#ifndef SPEECHFIX_DSP_FILTER_HPP
#define SPEECHFIX_DSP_FILTER_HPP

#include <string>
#include <vector>

#include "speechfix/audio.hpp"

namespace speechfix::dsp {

enum class LowpassKind {
  windowed_sinc_kaiser,  // default; >= 60 dB stopband at 1.15x cutoff
  windowed_sinc_hann,
  butterworth,
  chebyshev1,
};

LowpassKind lowpass_kind_from_string(const std::string& name);
std::string to_string(LowpassKind kind);

struct LowpassSpec {
  LowpassKind kind = LowpassKind::windowed_sinc_kaiser;
  double kaiser_beta = 10.0;
  double transition = 0.15;  // transition band as a fraction of cutoff
  int order = 6;             // IIR kinds
  double ripple_db = 1.0;    // chebyshev1 passband ripple
};

// Zero-phase lowpass. Sinc kinds are linear-phase FIR by construction; IIR
// kinds are rendered to symmetric taps by running the filter forward and
// backward over a unit impulse and truncating the decayed tail, so every
// kind is applied through the same interface.
struct FirFilter {
  std::vector<double> taps;  // odd length, symmetric around the center tap
  double nominal_cutoff_hz = 0.0;
};

FirFilter design_lowpass(double cutoff_hz, int sample_rate, const LowpassSpec& spec = {});

// Applies taps centered on each sample (no group delay); output length equals
// input length.
AudioSegment apply_filter(const AudioSegment& audio, const FirFilter& fir);

enum class ConvMode { full, same_length };

// Linear convolution; FFT-based when the kernel is long. same_length keeps
// the first len(audio) samples of the full result.
AudioSegment convolve(const AudioSegment& audio, const std::vector<double>& kernel, ConvMode mode);

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

double kaiser_bessel_i0(double x);

}  // namespace speechfix::dsp

#endif  // SPEECHFIX_DSP_FILTER_HPP
