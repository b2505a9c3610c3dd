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

#include "speechfix/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "speechfix/dsp/stft.hpp"

namespace speechfix::metrics {
namespace {

void require_aligned(const AudioSegment& ref, const AudioSegment& est, const char* what) {
  if (ref.sample_rate != est.sample_rate)
    throw std::invalid_argument(std::string(what) + ": sample rate mismatch");
  if (ref.samples.size() != est.samples.size())
    throw std::invalid_argument(std::string(what) + ": length mismatch");
}

// 1D Gaussian kernel of length n, normalized to sum 1.
std::vector<double> gaussian_kernel(int n, double sigma) {
  std::vector<double> k(n);
  double sum = 0.0;
  double c = (n - 1) / 2.0;
  for (int i = 0; i < n; ++i) {
    k[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& w : k) w /= sum;
  return k;
}

// Separable valid-region filtering: rows first, then columns. Output is
// (rows - n + 1) x (cols - n + 1).
Matrix filter_valid(const Matrix& x, const std::vector<double>& k) {
  int n = static_cast<int>(k.size());
  Matrix tmp(x.rows, x.cols - n + 1);
  for (int r = 0; r < x.rows; ++r) {
    const double* src = x.row(r);
    for (int c = 0; c < tmp.cols; ++c) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * src[c + i];
      tmp.at(r, c) = acc;
    }
  }
  Matrix out(x.rows - n + 1, tmp.cols);
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * tmp.at(r + i, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

Matrix elementwise_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

}  // namespace

double lsd(const AudioSegment& ref, const AudioSegment& est, int fft_size, int hop,
           double delta) {
  require_aligned(ref, est, "lsd");
  if (delta <= 0.0) throw std::invalid_argument("lsd: delta must be positive");
  dsp::Spectrogram sr = dsp::stft(ref, fft_size, hop);
  dsp::Spectrogram se = dsp::stft(est, fft_size, hop);
  double total = 0.0;
  for (int t = 0; t < sr.num_frames; ++t) {
    double acc = 0.0;
    for (int k = 0; k < sr.num_bins; ++k) {
      double pr = std::norm(sr.at(t, k));
      double pe = std::norm(se.at(t, k));
      double d = std::log10(pr + delta) - std::log10(pe + delta);
      acc += d * d;
    }
    total += std::sqrt(acc / sr.num_bins);
  }
  return total / sr.num_frames;
}

double ssim_image(const Matrix& ref, const Matrix& est, double dynamic_range) {
  require_same_shape(ref, est, "ssim");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  if (ref.rows < kWin || ref.cols < kWin)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");

  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  std::vector<double> k = gaussian_kernel(kWin, kSigma);

  Matrix mu_x = filter_valid(ref, k);
  Matrix mu_y = filter_valid(est, k);
  Matrix e_xx = filter_valid(elementwise_product(ref, ref), k);
  Matrix e_yy = filter_valid(elementwise_product(est, est), k);
  Matrix e_xy = filter_valid(elementwise_product(ref, est), k);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.v.size(); ++i) {
    double mx = mu_x.v[i];
    double my = mu_y.v[i];
    double var_x = e_xx.v[i] - mx * mx;
    double var_y = e_yy.v[i] - my * my;
    double cov = e_xy.v[i] - mx * my;
    double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
    double den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.v.size());
}

double ssim_spec(const AudioSegment& ref, const AudioSegment& est, int fft_size, int hop) {
  require_aligned(ref, est, "ssim_spec");
  Matrix mr = dsp::magnitude(dsp::stft(ref, fft_size, hop));
  Matrix me = dsp::magnitude(dsp::stft(est, fft_size, hop));
  double peak = 0.0;
  for (double v : mr.v) peak = std::max(peak, v);
  if (peak <= 0.0) throw std::invalid_argument("ssim_spec: reference spectrogram is all zero");
  return ssim_image(mr, me, peak);
}

double si_sdr(const AudioSegment& ref, const AudioSegment& est) {
  require_aligned(ref, est, "si_sdr");
  double dot = 0.0;
  double ref_energy = 0.0;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    dot += est.samples[i] * ref.samples[i];
    ref_energy += ref.samples[i] * ref.samples[i];
  }
  if (ref_energy == 0.0) throw std::invalid_argument("si_sdr: reference signal is zero");
  double alpha = dot / ref_energy;
  double target = alpha * alpha * ref_energy;
  double noise = 0.0;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    double e = est.samples[i] - alpha * ref.samples[i];
    noise += e * e;
  }
  if (noise <= 0.0 || target / noise >= 1e10) return 100.0;
  double db = 10.0 * std::log10(target / noise);
  return std::clamp(db, -100.0, 100.0);
}

}  // namespace speechfix::metrics
