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

// Short-time objective intelligibility, following the Taal et al. (2010)
// reference algorithm: 10 kHz, 256-sample frames at 50% overlap, 15
// one-third-octave bands from 150 Hz, 384 ms segments, normalized
// correlation with -15 dB SDR clipping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "speechfix/dsp/fft.hpp"
#include "speechfix/dsp/resample.hpp"
#include "speechfix/metrics/metrics.hpp"

namespace speechfix::metrics {
namespace {

constexpr int kFs = 10000;
constexpr int kFrame = 256;
constexpr int kHop = kFrame / 2;
constexpr int kFft = 512;
constexpr int kNumBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegFrames = 30;  // 30 frames * 12.8 ms = 384 ms
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = 2.220446049250313e-16;

// Symmetric Hann of length kFrame+2 with the zero endpoints dropped.
std::vector<double> analysis_window() {
  std::vector<double> w(kFrame);
  for (int i = 0; i < kFrame; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (i + 1) / (kFrame + 1));
  return w;
}

std::vector<int> frame_starts(std::size_t len) {
  std::vector<int> starts;
  for (int i = 0; i + kFrame < static_cast<int>(len); i += kHop) starts.push_back(i);
  return starts;
}

// Drops frames whose reference energy is more than kDynRange dB below the
// loudest reference frame, then rebuilds both signals by overlap-add of the
// windowed kept frames.
void remove_silent_frames(const std::vector<double>& x, const std::vector<double>& y,
                          std::vector<double>& x_out, std::vector<double>& y_out) {
  const std::vector<double> w = analysis_window();
  const std::vector<int> starts = frame_starts(x.size());
  if (starts.empty()) throw std::invalid_argument("stoi: input shorter than one frame");

  std::vector<double> energies(starts.size());
  double peak = -1e300;
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (int i = 0; i < kFrame; ++i) {
      double s = w[i] * x[starts[f] + i];
      e += s * s;
    }
    energies[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
    peak = std::max(peak, energies[f]);
  }

  std::vector<int> kept;
  for (std::size_t f = 0; f < starts.size(); ++f)
    if (energies[f] > peak - kDynRange) kept.push_back(starts[f]);
  if (kept.empty()) throw std::invalid_argument("stoi: no active speech in reference");

  std::size_t out_len = static_cast<std::size_t>(kept.size() - 1) * kHop + kFrame;
  x_out.assign(out_len, 0.0);
  y_out.assign(out_len, 0.0);
  for (std::size_t f = 0; f < kept.size(); ++f) {
    for (int i = 0; i < kFrame; ++i) {
      x_out[f * kHop + i] += w[i] * x[kept[f] + i];
      y_out[f * kHop + i] += w[i] * y[kept[f] + i];
    }
  }
}

// Power spectrogram, (num_frames x kFft/2+1).
std::vector<std::vector<double>> power_spectrum(const std::vector<double>& x) {
  const std::vector<double> w = analysis_window();
  const std::vector<int> starts = frame_starts(x.size());
  std::vector<std::vector<double>> spec;
  spec.reserve(starts.size());
  std::vector<double> buf(kFrame);
  for (int s : starts) {
    for (int i = 0; i < kFrame; ++i) buf[i] = w[i] * x[s + i];
    std::vector<std::complex<double>> half = dsp::rfft(buf.data(), kFrame, kFft);
    std::vector<double> p(half.size());
    for (std::size_t k = 0; k < half.size(); ++k) p[k] = std::norm(half[k]);
    spec.push_back(std::move(p));
  }
  return spec;
}

// One-third-octave band edges snapped to the nearest FFT bin; band i covers
// bins [lo, hi).
struct Band {
  int lo = 0;
  int hi = 0;
};

std::vector<Band> third_octave_bands() {
  const int num_bins = kFft / 2 + 1;
  auto nearest_bin = [&](double freq) {
    int best = 0;
    double best_d = 1e300;
    for (int i = 0; i < num_bins; ++i) {
      double f = static_cast<double>(i) * kFs / kFft;
      double d = (f - freq) * (f - freq);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  std::vector<Band> bands(kNumBands);
  for (int k = 0; k < kNumBands; ++k) {
    double fl = kMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0);
    double fh = kMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0);
    bands[k] = {nearest_bin(fl), nearest_bin(fh)};
  }
  return bands;
}

}  // namespace

double stoi(const AudioSegment& ref, const AudioSegment& est) {
  if (ref.sample_rate != est.sample_rate)
    throw std::invalid_argument("stoi: sample rate mismatch");
  if (ref.samples.size() != est.samples.size())
    throw std::invalid_argument("stoi: length mismatch");

  std::vector<double> x = dsp::resample(ref, kFs).samples;
  std::vector<double> y = dsp::resample(est, kFs).samples;

  std::vector<double> x_sil;
  std::vector<double> y_sil;
  remove_silent_frames(x, y, x_sil, y_sil);

  std::vector<std::vector<double>> px = power_spectrum(x_sil);
  std::vector<std::vector<double>> py = power_spectrum(y_sil);
  const int num_frames = static_cast<int>(px.size());
  if (num_frames < kSegFrames)
    throw std::invalid_argument(
        "stoi: not enough active speech (need at least 384 ms after silence removal)");

  // Band envelopes, (kNumBands x num_frames).
  const std::vector<Band> bands = third_octave_bands();
  Matrix xb(kNumBands, num_frames);
  Matrix yb(kNumBands, num_frames);
  for (int t = 0; t < num_frames; ++t) {
    for (int j = 0; j < kNumBands; ++j) {
      double ax = 0.0;
      double ay = 0.0;
      for (int k = bands[j].lo; k < bands[j].hi; ++k) {
        ax += px[t][k];
        ay += py[t][k];
      }
      xb.at(j, t) = std::sqrt(ax);
      yb.at(j, t) = std::sqrt(ay);
    }
  }

  const double clip = std::pow(10.0, -kBeta / 20.0);
  const int num_segments = num_frames - kSegFrames + 1;
  double total = 0.0;
  std::vector<double> xs(kSegFrames);
  std::vector<double> ys(kSegFrames);
  for (int m = 0; m < num_segments; ++m) {
    for (int j = 0; j < kNumBands; ++j) {
      double nx = 0.0;
      double ny = 0.0;
      for (int i = 0; i < kSegFrames; ++i) {
        xs[i] = xb.at(j, m + i);
        ys[i] = yb.at(j, m + i);
        nx += xs[i] * xs[i];
        ny += ys[i] * ys[i];
      }
      double alpha = std::sqrt(nx) / (std::sqrt(ny) + kEps);
      double mean_x = 0.0;
      double mean_y = 0.0;
      for (int i = 0; i < kSegFrames; ++i) {
        ys[i] = std::min(alpha * ys[i], xs[i] * (1.0 + clip));
        mean_x += xs[i];
        mean_y += ys[i];
      }
      mean_x /= kSegFrames;
      mean_y /= kSegFrames;
      double norm_x = 0.0;
      double norm_y = 0.0;
      for (int i = 0; i < kSegFrames; ++i) {
        xs[i] -= mean_x;
        ys[i] -= mean_y;
        norm_x += xs[i] * xs[i];
        norm_y += ys[i] * ys[i];
      }
      norm_x = std::sqrt(norm_x) + kEps;
      norm_y = std::sqrt(norm_y) + kEps;
      double corr = 0.0;
      for (int i = 0; i < kSegFrames; ++i) corr += (xs[i] / norm_x) * (ys[i] / norm_y);
      total += corr;
    }
  }
  return total / (static_cast<double>(num_segments) * kNumBands);
}

}  // namespace speechfix::metrics
