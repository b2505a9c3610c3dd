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

#ifndef SPEECHFIX_DSP_FFT_HPP
#define SPEECHFIX_DSP_FFT_HPP

#include <complex>
#include <vector>

namespace speechfix::dsp {

// In-place iterative radix-2 transform. Size must be a power of two.
// The inverse includes the 1/N scale.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Forward real-input transform returning bins 0..n/2 (length n/2 + 1).
// x is zero-padded (or truncated) to fft_size.
std::vector<std::complex<double>> rfft(const double* x, int n, int fft_size);

// Inverse of rfft: expands the Hermitian half-spectrum and returns fft_size
// real samples.
std::vector<double> irfft(const std::vector<std::complex<double>>& half, int fft_size);

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
int next_power_of_two(int n);

}  // namespace speechfix::dsp

#endif  // SPEECHFIX_DSP_FFT_HPP
