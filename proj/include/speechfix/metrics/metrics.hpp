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

#include "speechfix/audio.hpp"
#include "speechfix/matrix.hpp"

namespace speechfix::metrics {

// Log-spectral distance in log10 units: per frame the RMS over bins of the
// difference of log10 power spectra (floored at delta), averaged over
// frames. First argument is the reference.
double lsd(const AudioSegment& ref, const AudioSegment& est, int fft_size = 2048,
           int hop = 441, double delta = 1e-12);

// SSIM between two images with an 11x11 Gaussian window (sigma 1.5),
// k1=0.01, k2=0.03, averaged over the valid (fully overlapped) region.
double ssim_image(const Matrix& ref, const Matrix& est, double dynamic_range);

// SSIM of the magnitude spectrograms, dynamic range taken from the
// reference spectrogram's maximum.
double ssim_spec(const AudioSegment& ref, const AudioSegment& est, int fft_size = 2048,
                 int hop = 441);

// Short-time objective intelligibility (Taal et al.): both signals resampled
// to 10 kHz, silent frames removed (40 dB range), 15 one-third-octave bands
// from 150 Hz, normalized correlation over 384 ms segments with -15 dB SDR
// clipping. Throws when less than one full segment of active speech remains.
double stoi(const AudioSegment& ref, const AudioSegment& est);

// Scale-invariant SDR in dB, capped to [-100, 100].
double si_sdr(const AudioSegment& ref, const AudioSegment& est);

}  // namespace speechfix::metrics
