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

#ifndef SPEECHFIX_AUDIO_HPP
#define SPEECHFIX_AUDIO_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace speechfix {

// A mono signal: samples are dimensionless amplitudes, nominally in [-1, 1].
struct AudioSegment {
  std::vector<double> samples;
  int sample_rate = 44100;

  AudioSegment() = default;
  AudioSegment(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double rms(const AudioSegment& a) { return rms(a.samples); }

inline double peak_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double peak_abs(const AudioSegment& a) { return peak_abs(a.samples); }

inline bool all_finite(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// Throws when the segment violates its invariants (finite samples, rate > 0).
inline void validate(const AudioSegment& a) {
  if (a.sample_rate <= 0) throw std::invalid_argument("sample_rate must be positive");
  if (!all_finite(a.samples)) throw std::invalid_argument("audio contains NaN/Inf");
}

}  // namespace speechfix

#endif  // SPEECHFIX_AUDIO_HPP
