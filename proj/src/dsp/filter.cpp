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

#include "speechfix/dsp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "speechfix/dsp/fft.hpp"

namespace speechfix::dsp {

namespace {
constexpr double kPi = 3.141592653589793238462643;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

struct Biquad {
  // Direct form I coefficients, a0 normalized to 1.
  double b0, b1, b2, a1, a2;
};

void run_biquads_forward(const std::vector<Biquad>& sections, std::vector<double>& x) {
  for (const Biquad& s : sections) {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double& v : x) {
      const double x0 = v;
      const double y0 = s.b0 * x0 + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
      x2 = x1;
      x1 = x0;
      y2 = y1;
      y1 = y0;
      v = y0;
    }
  }
}

// Bilinear transform of c / (s^2 + a1 s + a0) with T = 2.
Biquad bilinear_sos(double c, double a1, double a0) {
  const double d = 1.0 + a1 + a0;
  return {c / d, 2.0 * c / d, c / d, (2.0 * a0 - 2.0) / d, (1.0 - a1 + a0) / d};
}

// Bilinear transform of c / (s + a).
Biquad bilinear_first_order(double c, double a) {
  const double d = 1.0 + a;
  return {c / d, c / d, 0.0, (a - 1.0) / d, 0.0};
}

std::vector<Biquad> butterworth_sections(double cutoff_hz, int sample_rate, int order) {
  const double warped = std::tan(kPi * cutoff_hz / sample_rate);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = kPi * (2.0 * k + 1.0) / (2.0 * order);
    const double re = -std::sin(theta);  // prototype pole real part (unit circle)
    const double a1 = -2.0 * re * warped;
    const double a0 = warped * warped;
    sections.push_back(bilinear_sos(a0, a1, a0));
  }
  if (order % 2 == 1) sections.push_back(bilinear_first_order(warped, warped));
  return sections;
}

std::vector<Biquad> chebyshev1_sections(double cutoff_hz, int sample_rate, int order,
                                        double ripple_db) {
  const double warped = std::tan(kPi * cutoff_hz / sample_rate);
  const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  const double sh = std::sinh(mu), ch = std::cosh(mu);

  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = kPi * (2.0 * k + 1.0) / (2.0 * order);
    const std::complex<double> pole(-sh * std::sin(theta), ch * std::cos(theta));
    const double a1 = -2.0 * pole.real() * warped;
    const double a0 = std::norm(pole) * warped * warped;
    sections.push_back(bilinear_sos(a0, a1, a0));  // unit DC gain per section
  }
  if (order % 2 == 1) {
    const double pr = sh * warped;
    sections.push_back(bilinear_first_order(pr, pr));
  }
  if (order % 2 == 0 && !sections.empty()) {
    // Even-order response sits ripple_db below unity at DC.
    const double g = std::pow(10.0, -ripple_db / 20.0);
    sections[0].b0 *= g;
    sections[0].b1 *= g;
    sections[0].b2 *= g;
  }
  return sections;
}

// Renders an IIR cascade to symmetric zero-phase taps by filtering a unit
// impulse forward and backward, then trimming the decayed tail.
std::vector<double> zero_phase_taps(const std::vector<Biquad>& sections) {
  int ring = 1024;
  for (;;) {
    std::vector<double> buf(static_cast<std::size_t>(2 * ring + 1), 0.0);
    buf[ring] = 1.0;
    run_biquads_forward(sections, buf);
    std::reverse(buf.begin(), buf.end());
    run_biquads_forward(sections, buf);
    std::reverse(buf.begin(), buf.end());

    double peak = 0.0;
    for (double v : buf) peak = std::max(peak, std::abs(v));
    // Tail must have decayed at the buffer edges; otherwise retry longer.
    const double edge = std::max(std::abs(buf.front()), std::abs(buf.back()));
    if (edge > peak * 1e-10 && ring < (1 << 20)) {
      ring *= 2;
      continue;
    }
    int radius = ring;
    while (radius > 1 && std::abs(buf[ring - radius]) < peak * 1e-9 &&
           std::abs(buf[ring + radius]) < peak * 1e-9)
      --radius;
    std::vector<double> taps(buf.begin() + (ring - radius), buf.begin() + (ring + radius + 1));
    return taps;
  }
}

int odd_at_least(int n) {
  if (n < 3) n = 3;
  return (n % 2 == 0) ? n + 1 : n;
}

}  // namespace

double kaiser_bessel_i0(double x) {
  // Power series; converges quickly for the beta values used here.
  const double half = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

LowpassKind lowpass_kind_from_string(const std::string& name) {
  if (name == "windowed_sinc_kaiser") return LowpassKind::windowed_sinc_kaiser;
  if (name == "windowed_sinc_hann") return LowpassKind::windowed_sinc_hann;
  if (name == "butterworth") return LowpassKind::butterworth;
  if (name == "chebyshev1") return LowpassKind::chebyshev1;
  throw std::invalid_argument("unknown lowpass kind: " + name);
}

std::string to_string(LowpassKind kind) {
  switch (kind) {
    case LowpassKind::windowed_sinc_kaiser: return "windowed_sinc_kaiser";
    case LowpassKind::windowed_sinc_hann: return "windowed_sinc_hann";
    case LowpassKind::butterworth: return "butterworth";
    case LowpassKind::chebyshev1: return "chebyshev1";
  }
  return "?";
}

FirFilter design_lowpass(double cutoff_hz, int sample_rate, const LowpassSpec& spec) {
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0))
    throw std::invalid_argument("design_lowpass: cutoff out of range (0, nyquist)");

  FirFilter fir;
  fir.nominal_cutoff_hz = cutoff_hz;

  switch (spec.kind) {
    case LowpassKind::windowed_sinc_kaiser: {
      const double atten_db = spec.kaiser_beta / 0.1102 + 8.7;
      const double dw = 2.0 * kPi * (spec.transition * cutoff_hz) / sample_rate;
      const int n = odd_at_least(static_cast<int>(std::ceil((atten_db - 8.0) / (2.285 * dw))));
      const int m = (n - 1) / 2;
      const double i0b = kaiser_bessel_i0(spec.kaiser_beta);
      fir.taps.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - m) / m;
        const double w = kaiser_bessel_i0(spec.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / i0b;
        fir.taps[i] = (2.0 * cutoff_hz / sample_rate) * sinc(2.0 * cutoff_hz * (i - m) / sample_rate) * w;
      }
      break;
    }
    case LowpassKind::windowed_sinc_hann: {
      const double df = spec.transition * cutoff_hz;
      const int n = odd_at_least(static_cast<int>(std::ceil(3.1 * sample_rate / df)));
      const int m = (n - 1) / 2;
      fir.taps.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - m) / m;
        const double w = 0.5 * (1.0 + std::cos(kPi * t));
        fir.taps[i] = (2.0 * cutoff_hz / sample_rate) * sinc(2.0 * cutoff_hz * (i - m) / sample_rate) * w;
      }
      break;
    }
    case LowpassKind::butterworth:
      fir.taps = zero_phase_taps(butterworth_sections(cutoff_hz, sample_rate, spec.order));
      break;
    case LowpassKind::chebyshev1:
      fir.taps = zero_phase_taps(chebyshev1_sections(cutoff_hz, sample_rate, spec.order, spec.ripple_db));
      break;
  }
  return fir;
}

AudioSegment apply_filter(const AudioSegment& audio, const FirFilter& fir) {
  if (fir.taps.empty()) throw std::invalid_argument("apply_filter: empty taps");
  const int delay = (static_cast<int>(fir.taps.size()) - 1) / 2;
  AudioSegment full = convolve(audio, fir.taps, ConvMode::full);
  AudioSegment out;
  out.sample_rate = audio.sample_rate;
  out.samples.assign(audio.samples.size(), 0.0);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(delay);
    if (j < full.samples.size()) out.samples[i] = full.samples[j];
  }
  return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("convolve: empty input");
  const std::size_t out_len = a.size() + b.size() - 1;

  if (std::min(a.size(), b.size()) <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double av = a[i];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += av * b[j];
    }
    return out;
  }

  const int p = next_power_of_two(static_cast<int>(out_len));
  auto fa = rfft(a.data(), static_cast<int>(a.size()), p);
  auto fb = rfft(b.data(), static_cast<int>(b.size()), p);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> full = irfft(fa, p);
  full.resize(out_len);
  return full;
}

AudioSegment convolve(const AudioSegment& audio, const std::vector<double>& kernel, ConvMode mode) {
  std::vector<double> full = convolve(audio.samples, kernel);
  AudioSegment out;
  out.sample_rate = audio.sample_rate;
  if (mode == ConvMode::same_length)
    full.resize(audio.samples.size());
  out.samples = std::move(full);
  return out;
}

}  // namespace speechfix::dsp
