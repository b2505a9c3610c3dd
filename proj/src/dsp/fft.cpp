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

#include "speechfix/dsp/fft.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace speechfix::dsp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if (!is_power_of_two(static_cast<int>(n)))
    throw std::invalid_argument("fft: size must be a power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wstep(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> t = a[i + k + len / 2] * w;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
        w *= wstep;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= scale;
  }
}

std::vector<std::complex<double>> rfft(const double* x, int n, int fft_size) {
  if (!is_power_of_two(fft_size)) throw std::invalid_argument("rfft: fft_size must be a power of two");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  const int m = std::min(n, fft_size);
  for (int i = 0; i < m; ++i) buf[i] = std::complex<double>(x[i], 0.0);
  fft(buf, false);
  buf.resize(static_cast<std::size_t>(fft_size) / 2 + 1);
  return buf;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& half, int fft_size) {
  if (static_cast<int>(half.size()) != fft_size / 2 + 1)
    throw std::invalid_argument("irfft: spectrum size does not match fft_size");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  for (int k = 0; k <= fft_size / 2; ++k) buf[k] = half[k];
  for (int k = 1; k < fft_size / 2; ++k) buf[fft_size - k] = std::conj(half[k]);
  fft(buf, true);
  std::vector<double> out(static_cast<std::size_t>(fft_size));
  for (int i = 0; i < fft_size; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace speechfix::dsp
