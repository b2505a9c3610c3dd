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

#include "speechfix/dsp/resample.hpp"

#include <cmath>
#include <stdexcept>

#include "speechfix/dsp/filter.hpp"

namespace speechfix::dsp {

namespace {
constexpr double kPi = 3.141592653589793238462643;
constexpr double kBeta = 10.0;
constexpr int kZeroCrossings = 16;
}  // namespace

AudioSegment resample(const AudioSegment& audio, int target_rate) {
  if (audio.sample_rate <= 0 || target_rate <= 0)
    throw std::invalid_argument("resample: sample rates must be positive");
  if (target_rate == audio.sample_rate) return audio;

  const double in_rate = audio.sample_rate;
  const double ratio = target_rate / in_rate;
  const std::size_t in_len = audio.samples.size();
  const std::size_t out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * ratio));

  AudioSegment out;
  out.sample_rate = target_rate;
  out.samples.assign(out_len, 0.0);
  if (in_len == 0 || out_len == 0) return out;

  // Cutoff in cycles per input sample.
  const double fc = 0.95 * std::min(in_rate, static_cast<double>(target_rate)) / 2.0 / in_rate;
  const double half = kZeroCrossings / (2.0 * fc);
  const int half_i = static_cast<int>(std::ceil(half));
  const double i0b = kaiser_bessel_i0(kBeta);

  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const int lo = std::max(0, static_cast<int>(std::ceil(t)) - half_i);
    const int hi = std::min(static_cast<int>(in_len) - 1, static_cast<int>(std::floor(t)) + half_i);
    double acc = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double tau = i - t;
      const double u = tau / half;
      if (u <= -1.0 || u >= 1.0) continue;
      const double w = kaiser_bessel_i0(kBeta * std::sqrt(1.0 - u * u)) / i0b;
      const double x = 2.0 * fc * tau;
      const double s = (std::abs(x) < 1e-12) ? 1.0 : std::sin(kPi * x) / (kPi * x);
      acc += audio.samples[static_cast<std::size_t>(i)] * 2.0 * fc * s * w;
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace speechfix::dsp
