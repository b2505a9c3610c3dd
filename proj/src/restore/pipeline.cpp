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

#include "speechfix/restore/pipeline.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "speechfix/dsp/stft.hpp"
#include "speechfix/nn/train.hpp"

namespace speechfix::restore {

namespace {

constexpr int kNnlsSweepCap = 200;
constexpr double kNnlsTol = 1e-8;

// Cholesky factorization of an SPD matrix, in place (lower triangle).
// Failure means the filterbank lost full column rank, which a valid
// filterbank construction rules out.
void cholesky(Matrix& a) {
  const int n = a.rows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a.at(i, j);
      for (int k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("rank-deficient filterbank");
        a.at(i, i) = std::sqrt(s);
      } else {
        a.at(i, j) = s / a.at(j, j);
      }
    }
  }
}

// Solves L L^T x = b in place for one right-hand side.
void cholesky_solve(const Matrix& l, double* b) {
  const int n = l.rows;
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * b[k];
    b[i] = s / l.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * b[k];
    b[i] = s / l.at(i, i);
  }
}

// mel (frames x mels) times the pseudo-inverse of W (bins x mels), negatives
// clamped to zero.
Matrix pinv_clamped(const Matrix& mel, const dsp::MelFilterbank& fb) {
  const Matrix& w = fb.weights;
  const int bins = w.rows, mels = w.cols;

  Matrix gram(mels, mels);
  for (int i = 0; i < mels; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int b = 0; b < bins; ++b) s += w.at(b, i) * w.at(b, j);
      gram.at(i, j) = s;
      gram.at(j, i) = s;
    }
  cholesky(gram);

  // pinv row block: solve gram * p_b = W^T e_b for every bin.
  Matrix pinv(bins, mels);
  std::vector<double> rhs(static_cast<std::size_t>(mels));
  for (int b = 0; b < bins; ++b) {
    for (int k = 0; k < mels; ++k) rhs[static_cast<std::size_t>(k)] = w.at(b, k);
    cholesky_solve(gram, rhs.data());
    for (int k = 0; k < mels; ++k) pinv.at(b, k) = rhs[static_cast<std::size_t>(k)];
  }

  Matrix mag(mel.rows, bins);
  for (int t = 0; t < mel.rows; ++t)
    for (int b = 0; b < bins; ++b) {
      double s = 0.0;
      for (int k = 0; k < mels; ++k) s += mel.at(t, k) * pinv.at(b, k);
      mag.at(t, b) = s > 0.0 ? s : 0.0;
    }
  return mag;
}

struct SparseRow {
  std::vector<std::pair<int, double>> entries;  // (mel band, weight)
  double diag = 0.0;                            // squared row norm
};

// Per-frame projected coordinate descent on 0.5*||W^T x - m||^2, x >= 0,
// warm-started from the clamped pseudo-inverse.
void nnls_refine(Matrix& mag, const Matrix& mel, const dsp::MelFilterbank& fb) {
  const Matrix& w = fb.weights;
  const int bins = w.rows, mels = w.cols;

  std::vector<SparseRow> rows(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    auto& row = rows[static_cast<std::size_t>(b)];
    for (int k = 0; k < mels; ++k) {
      const double v = w.at(b, k);
      if (v != 0.0) {
        row.entries.emplace_back(k, v);
        row.diag += v * v;
      }
    }
  }

  std::vector<double> r(static_cast<std::size_t>(mels));
  for (int t = 0; t < mel.rows; ++t) {
    double* x = mag.row(t);
    for (int k = 0; k < mels; ++k) r[static_cast<std::size_t>(k)] = -mel.at(t, k);
    for (int b = 0; b < bins; ++b)
      for (const auto& [k, v] : rows[static_cast<std::size_t>(b)].entries)
        r[static_cast<std::size_t>(k)] += v * x[b];

    for (int sweep = 0; sweep < kNnlsSweepCap; ++sweep) {
      double max_delta = 0.0;
      for (int b = 0; b < bins; ++b) {
        const auto& row = rows[static_cast<std::size_t>(b)];
        if (row.diag == 0.0) continue;
        double grad = 0.0;
        for (const auto& [k, v] : row.entries) grad += v * r[static_cast<std::size_t>(k)];
        const double next = std::max(0.0, x[b] - grad / row.diag);
        const double delta = next - x[b];
        if (delta != 0.0) {
          x[b] = next;
          for (const auto& [k, v] : row.entries) r[static_cast<std::size_t>(k)] += v * delta;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      if (max_delta < kNnlsTol) break;
    }
  }
}

dsp::MelSpectrogram extract_mel(const AudioSegment& x, const AnalysisConfig& cfg) {
  auto fb = dsp::build_mel_filterbank(x.sample_rate, cfg.fft_size, cfg.num_mels);
  return dsp::apply_mel(dsp::stft(x, cfg.fft_size, cfg.hop), fb);
}

}  // namespace

dsp::MelSpectrogram analyze(const AudioSegment& x, const AnalysisConfig& cfg,
                            const AudioSegment* target) {
  if (cfg.eps <= 0.0) throw std::invalid_argument("eps must be positive");
  auto x_mel = extract_mel(x, cfg);

  switch (cfg.estimator) {
    case Estimator::identity:
      return x_mel;
    case Estimator::oracle: {
      if (target == nullptr)
        throw std::invalid_argument("oracle analysis requires the aligned clean target");
      if (target->samples.size() != x.samples.size() || target->sample_rate != x.sample_rate)
        throw std::invalid_argument("oracle target must align with the input");
      auto s_mel = extract_mel(*target, cfg);
      Matrix mask(x_mel.frames.rows, x_mel.frames.cols);
      for (std::size_t i = 0; i < mask.size(); ++i)
        mask.v[i] = s_mel.frames.v[i] / (x_mel.frames.v[i] + cfg.eps);
      x_mel.frames = nn::apply_mask(mask, x_mel.frames, cfg.eps);
      return x_mel;
    }
    case Estimator::trained: {
      if (cfg.net != nullptr) {
        x_mel.frames = nn::apply_mask(cfg.net->forward_mask(x_mel.frames), x_mel.frames,
                                      cfg.eps);
        return x_mel;
      }
      if (cfg.checkpoint.empty())
        throw std::invalid_argument("trained analysis requires a net or checkpoint");
      auto net = nn::load_checkpoint(cfg.checkpoint);
      x_mel.frames = nn::apply_mask(net.forward_mask(x_mel.frames), x_mel.frames, cfg.eps);
      return x_mel;
    }
  }
  throw std::logic_error("unreachable estimator");
}

Matrix mel_to_linear(const dsp::MelSpectrogram& mel, const dsp::MelFilterbank& fb,
                     InversionMethod method) {
  if (mel.frames.cols != fb.num_mels)
    throw std::invalid_argument("mel width does not match the filterbank");
  if (mel.fft_size != 0 && mel.fft_size != fb.fft_size)
    throw std::invalid_argument("mel fft_size does not match the filterbank");

  Matrix mag = pinv_clamped(mel.frames, fb);
  if (method == InversionMethod::nnls) nnls_refine(mag, mel.frames, fb);
  return mag;
}

AudioSegment griffin_lim(const Matrix& magnitude, int fft_size, int hop, int sample_rate,
                         int out_len, int iters, double momentum,
                         std::vector<double>* residuals) {
  if (magnitude.cols != fft_size / 2 + 1)
    throw std::invalid_argument("magnitude bins do not match fft_size");
  if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0,1)");
  for (const auto v : magnitude.v)
    if (v < 0.0) throw std::invalid_argument("magnitude must be non-negative");
  if (residuals) residuals->clear();

  dsp::Spectrogram spec;
  spec.num_frames = magnitude.rows;
  spec.num_bins = magnitude.cols;
  spec.fft_size = fft_size;
  spec.hop = hop;
  spec.sample_rate = sample_rate;
  spec.frames.assign(magnitude.v.begin(), magnitude.v.end());  // zero phase

  double mag_norm = 0.0;
  for (const auto v : magnitude.v) mag_norm += v * v;
  mag_norm = std::sqrt(mag_norm);

  std::vector<std::complex<double>> angles(magnitude.size(), {1.0, 0.0});
  std::vector<std::complex<double>> prev;
  const double blend = momentum / (1.0 + momentum);

  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < spec.frames.size(); ++i)
      spec.frames[i] = magnitude.v[i] * angles[i];
    auto inverse = dsp::istft(spec, out_len);
    auto rebuilt = dsp::stft(inverse, fft_size, hop);

    if (residuals) {
      double err = 0.0;
      for (std::size_t i = 0; i < rebuilt.frames.size(); ++i) {
        const double d = std::abs(rebuilt.frames[i]) - magnitude.v[i];
        err += d * d;
      }
      residuals->push_back(mag_norm > 0.0 ? std::sqrt(err) / mag_norm : 0.0);
    }

    for (std::size_t i = 0; i < angles.size(); ++i) {
      std::complex<double> a = rebuilt.frames[i];
      if (!prev.empty()) a -= blend * prev[i];
      const double mod = std::abs(a);
      angles[i] = mod > 0.0 ? a / mod : std::complex<double>{1.0, 0.0};
    }
    prev.assign(rebuilt.frames.begin(), rebuilt.frames.end());
  }

  for (std::size_t i = 0; i < spec.frames.size(); ++i)
    spec.frames[i] = magnitude.v[i] * angles[i];
  return dsp::istft(spec, out_len);
}

AudioSegment restore_pipeline(const AudioSegment& x, const AnalysisConfig& analysis,
                              const SynthesisConfig& synthesis, const AudioSegment* target) {
  auto s_mel = analyze(x, analysis, target);
  auto fb = dsp::build_mel_filterbank(x.sample_rate, analysis.fft_size, analysis.num_mels);
  auto mag = mel_to_linear(s_mel, fb, synthesis.inversion);
  return griffin_lim(mag, analysis.fft_size, analysis.hop, x.sample_rate,
                     static_cast<int>(x.samples.size()), synthesis.griffin_lim_iters,
                     synthesis.momentum);
}

}  // namespace speechfix::restore
