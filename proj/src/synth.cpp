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

#include "speechfix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace speechfix::synth {

namespace {
constexpr double kPi = 3.141592653589793238462643;

// Two-pole resonance, unity gain at DC (Klatt-style cascade section).
struct Resonator {
  double a = 1.0, b = 0.0, c = 0.0;
  double y1 = 0.0, y2 = 0.0;

  void tune(double freq, double bw, double fs) {
    c = -std::exp(-2.0 * kPi * bw / fs);
    b = 2.0 * std::exp(-kPi * bw / fs) * std::cos(2.0 * kPi * freq / fs);
    a = 1.0 - b - c;
  }
  double step(double x) {
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Vowel {
  double f1, f2, f3;
};

constexpr Vowel kVowels[] = {
    {730.0, 1090.0, 2440.0},  // a
    {530.0, 1840.0, 2480.0},  // e
    {270.0, 2290.0, 3010.0},  // i
    {570.0, 840.0, 2410.0},   // o
    {300.0, 870.0, 2240.0},   // u
};

enum class Seg { vowel, fricative, plosive, pause };

}  // namespace

const std::vector<std::string>& noise_kinds() {
  static const std::vector<std::string> kinds = {"white", "pink", "hum", "modulated"};
  return kinds;
}

AudioSegment synth_noise(const std::string& kind, int len, int sample_rate, Rng& rng) {
  if (len <= 0) throw std::invalid_argument("synth_noise: length must be positive");
  AudioSegment out;
  out.sample_rate = sample_rate;
  out.samples.resize(static_cast<std::size_t>(len));

  if (kind == "white") {
    for (auto& v : out.samples) v = rng.normal();
  } else if (kind == "pink") {
    // Kellet's three-pole 1/f approximation.
    double b0 = 0, b1 = 0, b2 = 0;
    for (auto& v : out.samples) {
      const double w = rng.normal();
      b0 = 0.99765 * b0 + w * 0.0990460;
      b1 = 0.96300 * b1 + w * 0.2965164;
      b2 = 0.57000 * b2 + w * 1.0526913;
      v = (b0 + b1 + b2 + w * 0.1848) * 0.25;
    }
  } else if (kind == "hum") {
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < len; ++i) {
      const double t = 2.0 * kPi * 50.0 * i / sample_rate + phase;
      out.samples[static_cast<std::size_t>(i)] =
          std::sin(t) + 0.5 * std::sin(2.0 * t) + 0.25 * std::sin(3.0 * t) +
          0.02 * rng.normal();
    }
  } else if (kind == "modulated") {
    const double mod_hz = rng.uniform(0.5, 8.0);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < len; ++i) {
      const double env = 0.55 + 0.45 * std::sin(2.0 * kPi * mod_hz * i / sample_rate + phase);
      out.samples[static_cast<std::size_t>(i)] = env * rng.normal();
    }
  } else {
    throw std::invalid_argument("synth_noise: unknown kind " + kind);
  }

  const double r = rms(out);
  if (r > 0.0)
    for (auto& v : out.samples) v /= r;
  return out;
}

AudioSegment synth_speech(std::uint64_t seed, double duration_s, int sample_rate) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("synth_speech: duration must be positive");
  if (sample_rate <= 0) throw std::invalid_argument("synth_speech: bad sample rate");

  Rng rng(Rng::mix(seed, 0x53504bULL));
  const double fs = sample_rate;
  const int total = static_cast<int>(std::lround(duration_s * fs));

  // Speaker traits.
  const double f0_base = rng.uniform(95.0, 220.0);
  const double formant_scale = rng.uniform(0.92, 1.12);
  const double intoned = rng.uniform(0.25, 0.5);  // Hz of the intonation wobble

  AudioSegment out;
  out.sample_rate = sample_rate;
  out.samples.assign(static_cast<std::size_t>(total), 0.0);

  Resonator r1, r2, r3, r4, fric_res;
  r4.tune(3400.0 * formant_scale, 250.0, fs);

  double phase = 1.0;       // glottal phase in [0,1); starts at a pulse
  double tilt1 = 0.0, tilt2 = 0.0, prev_out = 0.0;
  int pos = 0;
  int syllables_left = rng.uniform_int(2, 5);

  auto render = [&](Seg seg, int seg_len) {
    const int n0 = pos;
    const int n1 = std::min(total, pos + seg_len);

    double vf1 = 0, vf2 = 0, vf3 = 0;
    double amp = 0.0;
    int silence_gap = 0;
    if (seg == Seg::vowel) {
      const Vowel& v = kVowels[rng.uniform_int(0, 4)];
      const double j = rng.uniform(0.96, 1.04);
      vf1 = v.f1 * formant_scale * j;
      vf2 = v.f2 * formant_scale * j;
      vf3 = v.f3 * formant_scale * j;
      r1.tune(vf1, 80.0, fs);
      r2.tune(vf2, 100.0, fs);
      r3.tune(vf3, 140.0, fs);
      // Syllable stress: levels spread over ~22 dB like natural speech, so
      // fixed-threshold clipping spares the quieter syllables.
      amp = std::pow(10.0, rng.uniform(-22.0, 0.0) / 20.0);
    } else if (seg == Seg::fricative) {
      fric_res.tune(rng.uniform(4000.0, 7500.0), rng.uniform(1200.0, 2400.0), fs);
      amp = rng.uniform(0.02, 0.06);
    } else if (seg == Seg::plosive) {
      fric_res.tune(rng.uniform(1500.0, 3500.0), rng.uniform(1000.0, 2000.0), fs);
      amp = rng.uniform(0.08, 0.2);
      silence_gap = static_cast<int>(0.018 * fs);
    }

    const int attack = static_cast<int>(0.015 * fs);
    const int release = static_cast<int>(0.03 * fs);
    const double syl_hz = rng.uniform(3.0, 6.0);

    for (int i = n0; i < n1; ++i, ++pos) {
      const double t = static_cast<double>(i) / fs;
      double env = amp;
      if (seg == Seg::pause) {
        env = 0.0;
      } else {
        if (i - n0 < silence_gap) env = 0.0;
        const int k = i - n0 - silence_gap;
        const int len = n1 - n0 - silence_gap;
        if (k >= 0 && k < attack) env *= static_cast<double>(k) / attack;
        if (len - k < release) env *= std::max(0.0, static_cast<double>(len - k) / release);
        env *= 1.0 + 0.35 * std::sin(2.0 * kPi * syl_hz * t);
        env *= 1.0 - 0.2 * t / duration_s;  // sentence declination
      }

      double sample = 0.0;
      if (seg == Seg::vowel) {
        const double f0 = f0_base * (1.0 + 0.08 * std::sin(2.0 * kPi * intoned * t)) *
                          (1.0 + 0.004 * rng.normal());
        phase += f0 / fs;
        double src = 0.0;
        if (phase >= 1.0) {
          phase -= 1.0;
          src = 1.0 + 0.05 * rng.normal();  // shimmer
        }
        // -12 dB/oct source tilt, then the formant cascade, then +6 dB/oct
        // radiation via a first difference.
        tilt1 = 0.98 * tilt1 + src;
        tilt2 = 0.94 * tilt2 + tilt1;
        double y = r1.step(tilt2 * 0.0012);
        y = r2.step(y);
        y = r3.step(y);
        y = r4.step(y);
        sample = (y - prev_out) * 40.0;
        prev_out = y;
      } else if (seg == Seg::fricative || seg == Seg::plosive) {
        const double y = fric_res.step(rng.normal());
        sample = (y - prev_out) * 0.6;
        prev_out = y;
      }
      out.samples[static_cast<std::size_t>(i)] += env * sample;
    }
  };

  while (pos < total) {
    if (syllables_left <= 0) {
      render(Seg::pause, static_cast<int>(rng.uniform(0.08, 0.25) * fs));
      syllables_left = rng.uniform_int(2, 5);
      continue;
    }
    if (rng.bernoulli(0.55)) {
      render(rng.bernoulli(0.6) ? Seg::fricative : Seg::plosive,
             static_cast<int>(rng.uniform(0.05, 0.13) * fs));
    }
    render(Seg::vowel, static_cast<int>(rng.uniform(0.12, 0.26) * fs));
    --syllables_left;
  }

  double peak = peak_abs(out);
  if (peak > 0.0)
    for (auto& v : out.samples) v *= 0.95 / peak;

  // Recording-style pink room tone at -38 dBFS. Real captures never reach
  // digital silence between words; the tone keeps per-band envelope valleys
  // at a realistic depth, which objective metrics are sensitive to.
  const double floor_amp = std::pow(10.0, -38.0 / 20.0);
  double b0 = 0, b1 = 0, b2 = 0;
  for (auto& v : out.samples) {
    const double w = rng.normal();
    b0 = 0.99765 * b0 + w * 0.0990460;
    b1 = 0.96300 * b1 + w * 0.2965164;
    b2 = 0.57000 * b2 + w * 1.0526913;
    v += floor_amp * (b0 + b1 + b2 + w * 0.1848) * 0.25;
  }
  peak = peak_abs(out);
  if (peak > 0.0)
    for (auto& v : out.samples) v *= 0.95 / peak;
  return out;
}

}  // namespace speechfix::synth
