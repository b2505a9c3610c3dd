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

#include "speechfix/audio.hpp"
#include "speechfix/dsp/filter.hpp"

namespace speechfix::degrade {

// Loops (tiles) or crops the segment to exactly len samples.
AudioSegment fit_to_length(const AudioSegment& a, std::size_t len);

// Gain g such that mixing s + g*n lands exactly at snr_db. Exposed so
// callers can reproduce the mix bit for bit.
double snr_gain(const AudioSegment& s, const AudioSegment& n, double snr_db);

// s + g*n with g from snr_gain. The noise is looped or cropped to match s.
// The result is not re-normalized. Throws "undefined SNR" when either input
// is silent.
AudioSegment apply_noise(const AudioSegment& s, const AudioSegment& n, double snr_db);

// Same-length convolution with the impulse response, after normalizing the
// response's absolute peak to 1.0 and shifting that peak (the direct path)
// to index 0 so the wet signal stays time-aligned with the dry one.
AudioSegment apply_reverb(const AudioSegment& s, const std::vector<double>& rir);

// Elementwise max(min(s, eta), -eta). eta must lie in [0, 1].
AudioSegment apply_clip(const AudioSegment& s, double eta);

// Lowpass at cutoff_hz, then resample to 2*cutoff_hz. With restore_rate the
// result is resampled back to the original rate and padded or trimmed to the
// input length, so clean/degraded pairs stay aligned.
AudioSegment apply_low_bandwidth(const AudioSegment& s, double cutoff_hz,
                                 const dsp::LowpassSpec& filter = {}, bool restore_rate = true);

}  // namespace speechfix::degrade
