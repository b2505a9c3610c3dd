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

#include "speechfix/degrade/distortions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "speechfix/dsp/resample.hpp"

namespace speechfix::degrade {

AudioSegment fit_to_length(const AudioSegment& a, std::size_t len) {
  if (a.samples.empty()) throw std::invalid_argument("fit_to_length: empty segment");
  AudioSegment out;
  out.sample_rate = a.sample_rate;
  out.samples.resize(len);
  for (std::size_t i = 0; i < len; ++i) out.samples[i] = a.samples[i % a.samples.size()];
  return out;
}

double snr_gain(const AudioSegment& s, const AudioSegment& n, double snr_db) {
  const double rs = rms(s);
  const double rn = rms(n);
  if (rs == 0.0 || rn == 0.0) throw std::invalid_argument("undefined SNR: silent input");
  return rs / (rn * std::pow(10.0, snr_db / 20.0));
}

AudioSegment apply_noise(const AudioSegment& s, const AudioSegment& n, double snr_db) {
  if (s.sample_rate != n.sample_rate)
    throw std::invalid_argument("apply_noise: sample rate mismatch");
  if (s.samples.empty() || n.samples.empty())
    throw std::invalid_argument("undefined SNR: silent input");
  AudioSegment fitted = fit_to_length(n, s.samples.size());
  const double g = snr_gain(s, fitted, snr_db);
  AudioSegment out;
  out.sample_rate = s.sample_rate;
  out.samples.resize(s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    out.samples[i] = s.samples[i] + g * fitted.samples[i];
  return out;
}

AudioSegment apply_reverb(const AudioSegment& s, const std::vector<double>& rir) {
  if (rir.empty()) throw std::invalid_argument("apply_reverb: empty rir");
  std::size_t peak_idx = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < rir.size(); ++i) {
    if (std::abs(rir[i]) > peak) {
      peak = std::abs(rir[i]);
      peak_idx = i;
    }
  }
  if (peak == 0.0) throw std::invalid_argument("apply_reverb: all-zero rir");

  // Normalize by the signed peak so the direct path lands at exactly +1.
  const double scale = 1.0 / rir[peak_idx];
  std::vector<double> aligned(rir.size() - peak_idx);
  for (std::size_t i = 0; i < aligned.size(); ++i) aligned[i] = rir[peak_idx + i] * scale;

  return dsp::convolve(s, aligned, dsp::ConvMode::same_length);
}

AudioSegment apply_clip(const AudioSegment& s, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("apply_clip: eta must lie in [0, 1]");
  AudioSegment out;
  out.sample_rate = s.sample_rate;
  out.samples.resize(s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    out.samples[i] = std::max(std::min(s.samples[i], eta), -eta);
  return out;
}

AudioSegment apply_low_bandwidth(const AudioSegment& s, double cutoff_hz,
                                 const dsp::LowpassSpec& filter, bool restore_rate) {
  if (!(2.0 * cutoff_hz >= 1000.0 && 2.0 * cutoff_hz <= 44100.0))
    throw std::invalid_argument("apply_low_bandwidth: cutoff out of range");
  const int target_rate = static_cast<int>(std::lround(2.0 * cutoff_hz));

  AudioSegment filtered = s;
  // At the full-band limit the lowpass is an identity; skip it since a
  // cutoff at Nyquist is not designable.
  if (target_rate < s.sample_rate)
    filtered = dsp::apply_filter(s, dsp::design_lowpass(cutoff_hz, s.sample_rate, filter));

  AudioSegment down = dsp::resample(filtered, target_rate);
  if (!restore_rate) return down;

  AudioSegment up = dsp::resample(down, s.sample_rate);
  up.samples.resize(s.samples.size(), 0.0);  // rounding can drift by a sample
  return up;
}

}  // namespace speechfix::degrade
