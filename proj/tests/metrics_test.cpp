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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "speechfix/audio.hpp"
#include "speechfix/degrade/chain.hpp"
#include "speechfix/degrade/distortions.hpp"
#include "speechfix/io/wav.hpp"
#include "speechfix/matrix.hpp"
#include "speechfix/metrics/metrics.hpp"
#include "speechfix/metrics/report.hpp"
#include "speechfix/rng.hpp"
#include "speechfix/synth.hpp"

using namespace speechfix;

namespace {

AudioSegment white_noise(int len, std::uint64_t seed, int rate = 44100) {
  Rng rng(seed);
  AudioSegment a;
  a.sample_rate = rate;
  a.samples.resize(static_cast<std::size_t>(len));
  for (auto& v : a.samples) v = 0.3 * rng.normal();
  return a;
}

AudioSegment scaled(const AudioSegment& a, double g) {
  AudioSegment out = a;
  for (auto& v : out.samples) v *= g;
  return out;
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (auto& v : m.v) v = rng.uniform(lo, hi);
  return m;
}

// Non-separable reference SSIM: explicit 11x11 Gaussian window at every
// valid position.
double ssim_oracle(const Matrix& x, const Matrix& y, double range) {
  const int n = 11;
  const double sigma = 1.5;
  double w[11][11];
  double wsum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      w[a][b] = std::exp(-((a - 5.0) * (a - 5.0) + (b - 5.0) * (b - 5.0)) / (2.0 * sigma * sigma));
      wsum += w[a][b];
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) w[a][b] /= wsum;

  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  double total = 0.0;
  int count = 0;
  for (int i = 0; i + n <= x.rows; ++i) {
    for (int j = 0; j + n <= x.cols; ++j) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double xv = x.at(i + a, j + b);
          double yv = y.at(i + a, j + b);
          mx += w[a][b] * xv;
          my += w[a][b] * yv;
          xx += w[a][b] * xv * xv;
          yy += w[a][b] * yv * yv;
          xy += w[a][b] * xv * yv;
        }
      double vx = xx - mx * mx;
      double vy = yy - my * my;
      double cov = xy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / count;
}

std::filesystem::path test_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "speechfix_metrics_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("lsd is zero for identical signals and positive otherwise") {
  auto a = synth::synth_speech(21, 1.0, 44100);
  CHECK(metrics::lsd(a, a) == 0.0);

  auto b = degrade::apply_clip(a, 0.3);
  CHECK(metrics::lsd(a, b) > 0.0);
}

TEST_CASE("a uniform 10x power offset scores exactly one") {
  // White noise keeps every bin far above the delta floor, so the log10
  // difference is 1 in each bin.
  auto ref = white_noise(44100, 5);
  auto est = scaled(ref, std::sqrt(10.0));
  CHECK(metrics::lsd(ref, est) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(metrics::lsd(est, ref) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lsd rejects misaligned inputs") {
  auto a = white_noise(44100, 1);
  auto b = white_noise(44099, 2);
  CHECK_THROWS_WITH_AS(metrics::lsd(a, b), doctest::Contains("length mismatch"),
                       std::invalid_argument);
  auto c = white_noise(44100, 3, 16000);
  CHECK_THROWS_WITH_AS(metrics::lsd(a, c), doctest::Contains("sample rate mismatch"),
                       std::invalid_argument);
}

TEST_CASE("compound degradation lands near the expected lsd range") {
  // Reverb+noise+clip degradations score around 2 on this metric; checked
  // as a batch mean over a small corpus. Band-limiting is measured
  // separately below: it empties the stopband to digital zero, and against
  // the fixed 1e-12 power floor every emptied bin costs several decades, so
  // the band-limited mean sits far above the fullband one. Published
  // figures for band-limited corpora stay near 2 only because 16-bit
  // sources carry a matched quantization floor in both spectra.
  degrade::DistortionChain fullband = degrade::default_chain();
  fullband.master_seed = 4242;
  fullband.specs.pop_back();
  REQUIRE(fullband.specs.back().kind == "clip");

  degrade::DistortionChain full = degrade::default_chain();
  full.master_seed = 4242;

  double mean = 0.0;
  double mean_full = 0.0;
  const int n = 10;
  for (int i = 0; i < n; ++i) {
    auto clean = synth::synth_speech(3000 + i, 2.0, 44100);
    mean += metrics::lsd(clean, degrade::compose(fullband, clean, i).audio);
    mean_full += metrics::lsd(clean, degrade::compose(full, clean, i).audio);
  }
  mean /= n;
  mean_full /= n;
  CHECK(mean > 1.5);
  CHECK(mean < 2.5);
  CHECK(mean_full > mean);
}

TEST_CASE("ssim is exactly one for identical images") {
  Matrix x = random_matrix(20, 30, 7);
  CHECK(metrics::ssim_image(x, x, 1.0) == 1.0);

  auto a = synth::synth_speech(9, 0.5, 44100);
  CHECK(metrics::ssim_spec(a, a) == 1.0);
}

TEST_CASE("ssim penalizes a constant luminance shift") {
  Matrix x = random_matrix(16, 24, 8);
  Matrix y = x;
  for (auto& v : y.v) v += 0.5;
  double s = metrics::ssim_image(x, y, 1.0);
  CHECK(s < 1.0);
  CHECK(s > -1.0);
}

TEST_CASE("ssim matches the double-loop oracle") {
  Matrix x = random_matrix(17, 23, 11);
  Matrix y = random_matrix(17, 23, 12);
  CHECK(metrics::ssim_image(x, y, 1.0) ==
        doctest::Approx(ssim_oracle(x, y, 1.0)).epsilon(1e-9));

  // Also through the spectrogram front end on a correlated pair.
  Matrix z = x;
  for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] = 0.8 * z.v[i] + 0.2 * y.v[i];
  CHECK(metrics::ssim_image(x, z, 2.5) ==
        doctest::Approx(ssim_oracle(x, z, 2.5)).epsilon(1e-9));
}

TEST_CASE("ssim stays within the unit interval on random pairs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix x = random_matrix(15, 15, 100 + seed);
    Matrix y = random_matrix(15, 15, 200 + seed);
    double s = metrics::ssim_image(x, y, 1.0);
    CHECK(s <= 1.0 + 1e-12);
    CHECK(s >= -1.0 - 1e-12);
  }
}

TEST_CASE("ssim validates its inputs") {
  Matrix x = random_matrix(16, 16, 1);
  Matrix y = random_matrix(16, 17, 2);
  CHECK_THROWS_WITH_AS(metrics::ssim_image(x, y, 1.0), doctest::Contains("shape mismatch"),
                       std::invalid_argument);
  Matrix small = random_matrix(10, 16, 3);
  CHECK_THROWS_WITH_AS(metrics::ssim_image(small, small, 1.0),
                       doctest::Contains("11x11 window"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(metrics::ssim_image(x, x, 0.0), doctest::Contains("dynamic range"),
                       std::invalid_argument);

  AudioSegment silence;
  silence.samples.assign(44100, 0.0);
  CHECK_THROWS_WITH_AS(metrics::ssim_spec(silence, silence), doctest::Contains("all zero"),
                       std::invalid_argument);
}

TEST_CASE("stoi scores identical speech near one") {
  auto a = synth::synth_speech(31, 3.0, 44100);
  CHECK(metrics::stoi(a, a) >= 0.99);
  CHECK(metrics::stoi(a, a) <= 1.0 + 1e-9);
}

TEST_CASE("stoi batch means land on the clipping operating points") {
  // Hard clipping at 0.25 and 0.1 full scale; batch means should sit near
  // 0.95 and 0.89 within +-0.05.
  const int n = 12;
  double mean25 = 0.0;
  double mean10 = 0.0;
  int ordered = 0;
  for (int i = 0; i < n; ++i) {
    auto clean = synth::synth_speech(800 + i, 3.0, 44100);
    double s25 = metrics::stoi(clean, degrade::apply_clip(clean, 0.25));
    double s10 = metrics::stoi(clean, degrade::apply_clip(clean, 0.1));
    mean25 += s25;
    mean10 += s10;
    if (s25 > s10) ++ordered;
  }
  mean25 /= n;
  mean10 /= n;
  CHECK(mean25 > 0.90);
  CHECK(mean25 < 1.00);
  CHECK(mean10 > 0.84);
  CHECK(mean10 < 0.94);
  // Harsher clipping is less intelligible, utterance by utterance.
  CHECK(ordered == n);
}

TEST_CASE("stoi drops to the floor for unrelated noise") {
  // Envelope correlations against an unrelated signal hover near zero but
  // fluctuate per item, so this is a batch-mean check.
  double mean = 0.0;
  const int n = 6;
  for (int i = 0; i < n; ++i) {
    auto speech = synth::synth_speech(55 + i, 3.0, 44100);
    auto noise = white_noise(static_cast<int>(speech.size()), 77 + i);
    mean += metrics::stoi(speech, noise);
  }
  CHECK(mean / n < 0.2);
}

TEST_CASE("stoi is invariant to a global gain on the estimate") {
  auto clean = synth::synth_speech(60, 3.0, 44100);
  auto est = degrade::apply_clip(clean, 0.3);
  double base = metrics::stoi(clean, est);
  CHECK(metrics::stoi(clean, scaled(est, 0.25)) == doctest::Approx(base).epsilon(1e-9));
  CHECK(metrics::stoi(clean, scaled(est, 8.0)) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("stoi refuses inputs without enough active speech") {
  auto a = synth::synth_speech(3, 0.2, 44100);
  CHECK_THROWS_WITH_AS(metrics::stoi(a, a), doctest::Contains("not enough active speech"),
                       std::invalid_argument);

  AudioSegment tiny;
  tiny.samples.assign(400, 0.1);
  CHECK_THROWS_WITH_AS(metrics::stoi(tiny, tiny), doctest::Contains("shorter than one frame"),
                       std::invalid_argument);

  auto b = synth::synth_speech(4, 1.0, 44100);
  auto c = synth::synth_speech(4, 1.1, 44100);
  CHECK_THROWS_WITH_AS(metrics::stoi(b, c), doctest::Contains("length mismatch"),
                       std::invalid_argument);
}

TEST_CASE("si_sdr caps pure rescaling at 100 dB") {
  auto ref = synth::synth_speech(14, 0.5, 44100);
  CHECK(metrics::si_sdr(ref, scaled(ref, 0.5)) == 100.0);
  CHECK(metrics::si_sdr(ref, ref) == 100.0);
}

TEST_CASE("si_sdr recovers a constructed 10 dB orthogonal noise floor") {
  auto ref = synth::synth_speech(15, 1.0, 44100);
  Rng rng(99);
  std::vector<double> noise(ref.size());
  for (auto& v : noise) v = rng.normal();

  double dot = 0.0;
  double ref_energy = 0.0;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    dot += noise[i] * ref.samples[i];
    ref_energy += ref.samples[i] * ref.samples[i];
  }
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] -= (dot / ref_energy) * ref.samples[i];
  double noise_energy = 0.0;
  for (double v : noise) noise_energy += v * v;
  double gain = std::sqrt(ref_energy / (10.0 * noise_energy));

  AudioSegment est = ref;
  for (std::size_t i = 0; i < est.samples.size(); ++i) est.samples[i] += gain * noise[i];
  // doctest tolerance = epsilon * (1 + |value|), so this is about +-0.01 dB.
  CHECK(metrics::si_sdr(ref, est) == doctest::Approx(10.0).epsilon(0.0009));
}

TEST_CASE("si_sdr is strongly negative for uncorrelated estimates") {
  auto ref = synth::synth_speech(16, 1.0, 44100);
  auto est = white_noise(static_cast<int>(ref.size()), 123);
  CHECK(metrics::si_sdr(ref, est) < -20.0);
}

TEST_CASE("si_sdr is invariant to positive scaling of the estimate") {
  auto ref = synth::synth_speech(17, 0.5, 44100);
  auto est = degrade::apply_clip(ref, 0.4);
  double base = metrics::si_sdr(ref, est);
  CHECK(metrics::si_sdr(ref, scaled(est, 3.0)) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("si_sdr rejects a zero reference") {
  AudioSegment zero;
  zero.samples.assign(1000, 0.0);
  AudioSegment est = white_noise(1000, 5);
  CHECK_THROWS_WITH_AS(metrics::si_sdr(zero, est), doctest::Contains("reference signal is zero"),
                       std::invalid_argument);
}

TEST_CASE("evaluate_corpus on an empty manifest reports zero utterances") {
  metrics::ReportMeta meta;
  meta.config_hash = "deadbeef";
  meta.corpus_id = "empty";
  auto report = metrics::evaluate_corpus({}, {}, meta);
  CHECK(report.num_utterances == 0);
  CHECK(report.per_utterance.empty());
  CHECK(report.failures.empty());
  CHECK(std::isnan(report.mean.lsd));
  CHECK(report.to_json().find("\"num_utterances\": 0") != std::string::npos);
}

TEST_CASE("evaluate_corpus scores a single identical pair as perfect") {
  auto dir = test_dir("identical");
  auto speech = synth::synth_speech(70, 3.0, 44100);
  io::wav_write((dir / "ref.wav").string(), speech);
  io::wav_write((dir / "est.wav").string(), speech);

  metrics::ReportMeta meta;
  meta.corpus_id = "single";
  auto report = metrics::evaluate_corpus(
      {{"utt0", (dir / "ref.wav").string(), (dir / "est.wav").string()}}, {}, meta);
  REQUIRE(report.num_utterances == 1);
  CHECK(report.per_utterance[0].lsd == 0.0);
  CHECK(report.per_utterance[0].ssim == 1.0);
  CHECK(report.per_utterance[0].stoi >= 0.99);
  CHECK(report.per_utterance[0].si_sdr == 100.0);
  CHECK(report.mean.lsd == 0.0);
  CHECK(report.stddev.lsd == 0.0);
}

TEST_CASE("evaluate_corpus aggregates are the arithmetic mean") {
  auto dir = test_dir("aggregate");
  std::vector<metrics::EvalItem> items;
  for (int i = 0; i < 3; ++i) {
    auto clean = synth::synth_speech(200 + i, 3.0, 44100);
    auto degraded = degrade::apply_clip(clean, 0.15 + 0.2 * i);
    auto ref = dir / ("ref" + std::to_string(i) + ".wav");
    auto est = dir / ("est" + std::to_string(i) + ".wav");
    io::wav_write(ref.string(), clean);
    io::wav_write(est.string(), degraded);
    items.push_back({"utt" + std::to_string(i), ref.string(), est.string()});
  }
  auto report = metrics::evaluate_corpus(items, {}, {});
  REQUIRE(report.num_utterances == 3);
  double mean_lsd = 0.0;
  double mean_stoi = 0.0;
  for (const auto& u : report.per_utterance) {
    mean_lsd += u.lsd;
    mean_stoi += u.stoi;
  }
  mean_lsd /= 3.0;
  mean_stoi /= 3.0;
  CHECK(report.mean.lsd == doctest::Approx(mean_lsd).epsilon(1e-12));
  CHECK(report.mean.stoi == doctest::Approx(mean_stoi).epsilon(1e-12));

  double var = 0.0;
  for (const auto& u : report.per_utterance) var += (u.lsd - mean_lsd) * (u.lsd - mean_lsd);
  CHECK(report.stddev.lsd == doctest::Approx(std::sqrt(var / 3.0)).epsilon(1e-12));
}

TEST_CASE("evaluate_corpus reruns byte-identically") {
  auto dir = test_dir("replay");
  auto clean = synth::synth_speech(300, 3.0, 44100);
  auto degraded = degrade::apply_clip(clean, 0.2);
  io::wav_write((dir / "ref.wav").string(), clean);
  io::wav_write((dir / "est.wav").string(), degraded);
  std::vector<metrics::EvalItem> items = {
      {"utt0", (dir / "ref.wav").string(), (dir / "est.wav").string()}};

  metrics::ReportMeta meta;
  meta.config_hash = "cafe01";
  meta.seed = 7;
  meta.corpus_id = "replay";
  auto a = metrics::evaluate_corpus(items, {}, meta);
  auto b = metrics::evaluate_corpus(items, {}, meta);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("evaluate_corpus records failures and keeps going") {
  auto dir = test_dir("failures");
  auto clean = synth::synth_speech(400, 3.0, 44100);
  io::wav_write((dir / "ref.wav").string(), clean);
  io::wav_write((dir / "est.wav").string(), degrade::apply_clip(clean, 0.3));

  auto shorter = clean;
  shorter.samples.resize(shorter.samples.size() / 2);
  io::wav_write((dir / "short.wav").string(), shorter);

  std::vector<metrics::EvalItem> items = {
      {"missing", (dir / "ref.wav").string(), (dir / "nope.wav").string()},
      {"good", (dir / "ref.wav").string(), (dir / "est.wav").string()},
      {"mismatched", (dir / "ref.wav").string(), (dir / "short.wav").string()},
  };
  auto report = metrics::evaluate_corpus(items, {}, {});
  REQUIRE(report.num_utterances == 1);
  CHECK(report.per_utterance[0].id == "good");
  REQUIRE(report.failures.size() == 2);
  CHECK(report.failures[0].id == "missing");
  CHECK(report.failures[1].id == "mismatched");
  CHECK(report.failures[1].error.find("length mismatch") != std::string::npos);
  CHECK(report.to_json().find("\"failures\"") != std::string::npos);
}

TEST_CASE("disabled metrics serialize as null columns") {
  auto dir = test_dir("metricset");
  auto clean = synth::synth_speech(500, 3.0, 44100);
  io::wav_write((dir / "ref.wav").string(), clean);
  io::wav_write((dir / "est.wav").string(), clean);

  metrics::MetricSet set;
  set.stoi = false;
  set.si_sdr = false;
  auto report = metrics::evaluate_corpus(
      {{"utt0", (dir / "ref.wav").string(), (dir / "ref.wav").string()}}, set, {});
  REQUIRE(report.num_utterances == 1);
  CHECK(std::isnan(report.per_utterance[0].stoi));
  CHECK(std::isnan(report.mean.stoi));
  CHECK(report.per_utterance[0].lsd == 0.0);

  auto json = nlohmann::json::parse(report.to_json());
  CHECK(json["per_utterance"][0]["stoi"].is_null());
  CHECK(json["per_utterance"][0]["pesq_wb"].is_null());
  CHECK(json["aggregate"]["mean"]["si_sdr"].is_null());

  std::string csv = report.to_csv();
  CHECK(csv.find("id,lsd,ssim,stoi,si_sdr,pesq_wb\n") == 0);
  // utterance row: id, lsd, ssim, then empty stoi/si_sdr/pesq cells
  CHECK(csv.find("utt0,0,1,,,\n") != std::string::npos);
}
