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
#include <complex>
#include <vector>

#include "speechfix/audio.hpp"
#include "speechfix/degrade/chain.hpp"
#include "speechfix/degrade/distortions.hpp"
#include "speechfix/degrade/rir.hpp"
#include "speechfix/dsp/fft.hpp"
#include "speechfix/rng.hpp"
#include "speechfix/synth.hpp"

using namespace speechfix;
using namespace speechfix::degrade;

namespace {

AudioSegment noise_seg(int rate, int len, std::uint64_t seed) {
  Rng rng(seed);
  AudioSegment a;
  a.sample_rate = rate;
  a.samples.resize(static_cast<std::size_t>(len));
  for (auto& v : a.samples) v = rng.uniform(-0.5, 0.5);
  return a;
}

double band_energy(const AudioSegment& a, double lo_hz, double hi_hz) {
  const int n = dsp::next_power_of_two(static_cast<int>(a.size()));
  auto f = dsp::rfft(a.samples.data(), static_cast<int>(a.size()), n);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double hz = static_cast<double>(k) * a.sample_rate / n;
    if (hz >= lo_hz && hz < hi_hz) acc += std::norm(f[k]);
  }
  return acc;
}

}  // namespace

TEST_CASE("fit_to_length loops and crops") {
  AudioSegment a({1.0, 2.0, 3.0}, 44100);
  auto longer = fit_to_length(a, 7);
  CHECK(longer.samples == std::vector<double>{1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0});
  auto shorter = fit_to_length(a, 2);
  CHECK(shorter.samples == std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(fit_to_length(AudioSegment{}, 5), std::invalid_argument);
}

TEST_CASE("snr gain hits the textbook values") {
  AudioSegment s(std::vector<double>(100, 0.1), 44100);
  AudioSegment n(std::vector<double>(100, -0.1), 44100);
  CHECK(snr_gain(s, n, 0.0) == 1.0);
  CHECK(snr_gain(s, n, 20.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(snr_gain(s, n, -20.0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("apply_noise lands exactly on the requested snr") {
  auto s = noise_seg(44100, 20000, 1);
  auto n = noise_seg(44100, 20000, 2);
  for (double snr : {-10.0, 0.0, 7.5, 30.0}) {
    auto out = apply_noise(s, n, snr);
    std::vector<double> added(out.samples.size());
    for (std::size_t i = 0; i < added.size(); ++i) added[i] = out.samples[i] - s.samples[i];
    const double measured = 20.0 * std::log10(rms(s.samples) / rms(added));
    CHECK(measured == doctest::Approx(snr).epsilon(1e-6));
  }
}

TEST_CASE("apply_noise mix is reproducible sample for sample") {
  auto s = noise_seg(44100, 5000, 3);
  auto n = noise_seg(44100, 1700, 4);  // also exercises looping
  auto out = apply_noise(s, n, 12.0);
  auto fitted = fit_to_length(n, s.samples.size());
  const double g = snr_gain(s, fitted, 12.0);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(out.samples[i] == s.samples[i] + g * fitted.samples[i]);

  auto replay = apply_noise(s, n, 12.0);
  CHECK(replay.samples == out.samples);
}

TEST_CASE("apply_noise rejects silent inputs") {
  auto s = noise_seg(44100, 100, 5);
  AudioSegment silent(std::vector<double>(100, 0.0), 44100);
  CHECK_THROWS_WITH_AS(apply_noise(s, silent, 0.0), doctest::Contains("undefined SNR"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_noise(silent, s, 0.0), doctest::Contains("undefined SNR"),
                       std::invalid_argument);
}

TEST_CASE("apply_reverb normalizes and aligns the direct path") {
  auto s = noise_seg(44100, 3000, 6);

  auto unit = apply_reverb(s, {1.0});
  CHECK(unit.samples == s.samples);

  auto scaled = apply_reverb(s, {0.5});
  CHECK(scaled.samples == s.samples);

  // Peak off the origin: the output must stay aligned with the input.
  auto delayed = apply_reverb(s, {0.0, 0.0, 0.7});
  CHECK(delayed.samples == s.samples);

  std::vector<double> rir(400, 0.0);
  rir[0] = 1.0;
  rir[300] = 0.5;
  auto echoed = apply_reverb(s, rir);
  REQUIRE(echoed.size() == s.size());
  for (std::size_t i = 0; i < 300; ++i) CHECK(echoed.samples[i] == doctest::Approx(s.samples[i]));
  CHECK(echoed.samples[350] == doctest::Approx(s.samples[350] + 0.5 * s.samples[50]));
}

TEST_CASE("reverb tails extend past the dry signal") {
  auto s = noise_seg(44100, 2000, 7);
  std::vector<double> rir(500, 0.0);
  rir[0] = 1.0;
  rir[450] = 0.3;
  auto full = dsp::convolve(s, rir, dsp::ConvMode::full);
  double tail = 0.0;
  for (std::size_t i = s.size(); i < full.size(); ++i) tail += full.samples[i] * full.samples[i];
  CHECK(tail > 0.0);
}

TEST_CASE("apply_reverb rejects empty and silent responses") {
  auto s = noise_seg(44100, 100, 8);
  CHECK_THROWS_AS(apply_reverb(s, {}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_reverb(s, {0.0, 0.0}), doctest::Contains("all-zero"),
                       std::invalid_argument);
}

TEST_CASE("apply_clip matches the closed form") {
  AudioSegment s({0.5, -0.9, 0.1}, 44100);
  auto out = apply_clip(s, 0.25);
  CHECK(out.samples == std::vector<double>{0.25, -0.25, 0.1});

  auto id = apply_clip(noise_seg(44100, 500, 9), 1.0);
  auto in = noise_seg(44100, 500, 9);
  CHECK(id.samples == in.samples);

  CHECK_THROWS_AS(apply_clip(s, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_clip(s, 1.5), std::invalid_argument);
}

TEST_CASE("apply_clip is idempotent and bounded") {
  auto s = noise_seg(44100, 4000, 10);
  for (auto& v : s.samples) v *= 3.0;
  for (double eta : {0.1, 0.25, 0.8}) {
    auto once = apply_clip(s, eta);
    auto twice = apply_clip(once, eta);
    CHECK(once.samples == twice.samples);
    for (double v : once.samples) CHECK(std::abs(v) <= eta);
  }
}

TEST_CASE("full band low_bandwidth is a passthrough") {
  auto s = noise_seg(44100, 4000, 11);
  auto out = apply_low_bandwidth(s, 22050.0);
  CHECK(out.samples == s.samples);
  CHECK(out.sample_rate == 44100);
}

TEST_CASE("low_bandwidth removes energy above the cutoff") {
  auto s = noise_seg(44100, 44100, 12);
  auto out = apply_low_bandwidth(s, 2000.0);
  REQUIRE(out.size() == s.size());
  CHECK(out.sample_rate == 44100);
  const double above = band_energy(out, 2300.0, 22050.0);
  const double total = band_energy(out, 0.0, 22050.0);
  CHECK(10.0 * std::log10(above / total) < -40.0);
}

TEST_CASE("low_bandwidth keeps or changes the rate per the flag") {
  auto s = noise_seg(44100, 10000, 13);
  auto kept = apply_low_bandwidth(s, 4000.0, {}, true);
  CHECK(kept.size() == s.size());
  CHECK(kept.sample_rate == 44100);

  auto reduced = apply_low_bandwidth(s, 4000.0, {}, false);
  CHECK(reduced.sample_rate == 8000);
  CHECK(reduced.size() == static_cast<std::size_t>(std::lround(10000.0 * 8000.0 / 44100.0)));
}

TEST_CASE("low_bandwidth validates the cutoff") {
  auto s = noise_seg(44100, 1000, 14);
  CHECK_THROWS_AS(apply_low_bandwidth(s, 400.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_low_bandwidth(s, 23000.0), std::invalid_argument);
}

TEST_CASE("anechoic rooms collapse to the direct path") {
  RoomSpec room;
  RirOptions opts;
  opts.fixed_absorption = 1.0;
  auto rir = simulate_rir(room, 44100, 1, opts);

  std::size_t peak_idx = 0;
  double peak = 0.0, total = 0.0;
  for (std::size_t i = 0; i < rir.size(); ++i) {
    total += rir[i] * rir[i];
    if (std::abs(rir[i]) > peak) {
      peak = std::abs(rir[i]);
      peak_idx = i;
    }
  }
  double tail = 0.0;
  for (std::size_t i = peak_idx + 100; i < rir.size(); ++i) tail += rir[i] * rir[i];
  CHECK(10.0 * std::log10(tail / total) < -60.0);

  // Direct path shows up at distance/c.
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double dd = room.source_pos[i] - room.mic_pos[i];
    d += dd * dd;
  }
  d = std::sqrt(d);
  CHECK(static_cast<double>(peak_idx) ==
        doctest::Approx(d / 343.0 * 44100.0).epsilon(0.02));
}

TEST_CASE("direct path follows the inverse distance law") {
  RirOptions opts;
  opts.fixed_absorption = 1.0;
  RoomSpec near;
  near.dimensions = {12.0, 9.0, 8.0};
  near.source_pos = {3.0, 4.5, 4.0};
  near.mic_pos = {4.0, 4.5, 4.0};  // 1 m
  RoomSpec far = near;
  far.mic_pos = {5.0, 4.5, 4.0};  // 2 m

  // Compare energies in a window around the direct tap; peak tap values
  // alone are skewed by how the fractional delay splits across taps.
  auto direct_amp = [](const std::vector<double>& rir) {
    std::size_t peak = 0;
    for (std::size_t i = 0; i < rir.size(); ++i)
      if (std::abs(rir[i]) > std::abs(rir[peak])) peak = i;
    double e = 0.0;
    const std::size_t lo = peak > 25 ? peak - 25 : 0;
    for (std::size_t i = lo; i < std::min(rir.size(), peak + 25); ++i) e += rir[i] * rir[i];
    return std::sqrt(e);
  };

  const double an = direct_amp(simulate_rir(near, 44100, 2, opts));
  const double af = direct_amp(simulate_rir(far, 44100, 2, opts));
  CHECK(20.0 * std::log10(an / af) == doctest::Approx(6.02).epsilon(0.02));
}

TEST_CASE("simulated decay matches the requested rt60") {
  RoomSpec room;
  room.dimensions = {6.0, 5.0, 4.0};
  room.source_pos = {2.0, 2.5, 1.5};
  room.mic_pos = {4.0, 2.0, 2.0};
  for (double rt60 : {0.2, 0.5, 0.7}) {
    room.rt60 = rt60;
    room.max_order = 120;
    auto rir = simulate_rir(room, 44100, 3);
    CHECK(rir.size() >= static_cast<std::size_t>(rt60 * 44100));
    const double est = estimate_rt60_schroeder(rir, 44100);
    CHECK(std::abs(est - rt60) / rt60 < 0.2);
  }
}

TEST_CASE("sampled rooms also land within the rt60 tolerance") {
  for (std::uint64_t seed : {101, 202, 303}) {
    const RoomSpec room = sample_room(seed, 0.15, 0.6);
    auto rir = simulate_rir(room, 44100, seed);
    const double est = estimate_rt60_schroeder(rir, 44100);
    CHECK(std::abs(est - room.rt60) / room.rt60 < 0.2);
  }
}

TEST_CASE("impossible rt60 requests are refused") {
  RoomSpec room;
  room.dimensions = {3.0, 3.0, 3.0};
  room.source_pos = {1.0, 1.0, 1.0};
  room.mic_pos = {2.0, 2.0, 2.0};
  room.rt60 = 0.05;
  CHECK_THROWS_WITH_AS(simulate_rir(room, 44100, 4), doctest::Contains("infeasible RT60"),
                       std::invalid_argument);
}

TEST_CASE("rir simulation is deterministic") {
  RoomSpec room;
  room.rt60 = 0.25;
  auto a = simulate_rir(room, 44100, 5);
  auto b = simulate_rir(room, 44100, 5);
  CHECK(a == b);
}

TEST_CASE("room validation rejects outside positions") {
  RoomSpec room;
  room.source_pos = {7.0, 2.5, 1.5};  // beyond the 6 m wall
  CHECK_THROWS_AS(simulate_rir(room, 44100, 6), std::invalid_argument);
  room = RoomSpec{};
  room.rt60 = -0.1;
  CHECK_THROWS_AS(simulate_rir(room, 44100, 6), std::invalid_argument);
}

TEST_CASE("sample_room is deterministic and respects its invariants") {
  CHECK(sample_room(42).dimensions == sample_room(42).dimensions);
  CHECK(sample_room(42).rt60 == sample_room(42).rt60);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const RoomSpec room = sample_room(seed);
    for (int i = 0; i < 3; ++i) {
      CHECK(room.dimensions[i] >= 3.0);
      CHECK(room.dimensions[i] <= 10.0);
      CHECK(room.source_pos[i] >= 0.5);
      CHECK(room.source_pos[i] <= room.dimensions[i] - 0.5);
      CHECK(room.mic_pos[i] >= 0.5);
      CHECK(room.mic_pos[i] <= room.dimensions[i] - 0.5);
    }
    CHECK(room.rt60 >= 0.05);
    CHECK(room.rt60 <= 1.0);
    CHECK(sabine_absorption(room) <= 0.95);
  }
}

TEST_CASE("schroeder estimator recovers a synthetic exponential decay") {
  Rng rng(99);
  const int sr = 44100;
  for (double t60 : {0.3, 0.6}) {
    std::vector<double> rir(static_cast<std::size_t>(1.2 * t60 * sr));
    for (std::size_t i = 0; i < rir.size(); ++i) {
      const double t = static_cast<double>(i) / sr;
      rir[i] = std::pow(10.0, -3.0 * t / t60) * rng.normal();
    }
    const double est = estimate_rt60_schroeder(rir, sr);
    CHECK(std::abs(est - t60) / t60 < 0.1);
  }
}

TEST_CASE("synthetic noise kinds are unit rms and shaped") {
  Rng rng(7);
  for (const auto& kind : synth::noise_kinds()) {
    Rng local(7);
    auto n = synth::synth_noise(kind, 44100, 44100, local);
    CHECK(n.size() == 44100);
    CHECK(rms(n) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(all_finite(n.samples));
  }

  Rng r1(8), r2(8);
  auto a = synth::synth_noise("pink", 10000, 44100, r1);
  auto b = synth::synth_noise("pink", 10000, 44100, r2);
  CHECK(a.samples == b.samples);

  // Pink slopes down (compare per-Hz densities); hum concentrates near the
  // 50 Hz harmonics stack.
  Rng r3(9);
  auto pink = synth::synth_noise("pink", 65536, 44100, r3);
  CHECK(band_energy(pink, 50.0, 500.0) / 450.0 >
        4.0 * band_energy(pink, 5000.0, 10000.0) / 5000.0);
  Rng r4(10);
  auto hum = synth::synth_noise("hum", 65536, 44100, r4);
  CHECK(band_energy(hum, 40.0, 170.0) > 20.0 * band_energy(hum, 300.0, 22050.0));

  Rng r5(11);
  CHECK_THROWS_AS(synth::synth_noise("brown", 100, 44100, r5), std::invalid_argument);
}

TEST_CASE("synthetic speech is deterministic and speech shaped") {
  auto a = synth::synth_speech(1234, 2.0, 44100);
  auto b = synth::synth_speech(1234, 2.0, 44100);
  CHECK(a.samples == b.samples);
  CHECK(a.size() == 88200);
  CHECK(peak_abs(a) <= 1.0);
  CHECK(peak_abs(a) > 0.9);
  CHECK(rms(a) > 0.01);
  CHECK(all_finite(a.samples));

  auto c = synth::synth_speech(999, 2.0, 44100);
  CHECK(a.samples != c.samples);

  // Spectral energy should concentrate below 4 kHz like real speech.
  CHECK(band_energy(a, 50.0, 4000.0) > 3.0 * band_energy(a, 4000.0, 22050.0));
}

TEST_CASE("empty chains are the identity") {
  DistortionChain chain;
  auto s = noise_seg(44100, 5000, 20);
  auto res = compose(chain, s, 0);
  CHECK(res.audio.samples == s.samples);
  CHECK(res.params.empty());
}

TEST_CASE("degenerate ranges pin the drawn parameter") {
  DistortionChain chain;
  DistortionSpec clip;
  clip.kind = "clip";
  clip.eta_lo = clip.eta_hi = 0.1;
  chain.specs.push_back(clip);
  auto s = noise_seg(44100, 5000, 21);
  for (auto& v : s.samples) v *= 4.0;
  auto res = compose(chain, s, 3);
  auto want = apply_clip(s, 0.1);
  CHECK(res.audio.samples == want.samples);
  CHECK(res.params[0]["eta"].get<double>() == 0.1);
}

TEST_CASE("compose replays bit for bit and varies by item") {
  DistortionChain chain = default_chain();
  chain.master_seed = 77;
  chain.specs[0].rt60_lo = 0.1;  // keep the unit test fast
  chain.specs[0].rt60_hi = 0.3;

  auto s = synth::synth_speech(5, 1.0, 44100);
  auto r1 = compose(chain, s, 4);
  auto r2 = compose(chain, s, 4);
  CHECK(r1.audio.samples == r2.audio.samples);
  CHECK(r1.params == r2.params);

  auto r3 = compose(chain, s, 5);
  CHECK(r1.params != r3.params);

  CHECK(r1.audio.size() == s.size());
  CHECK(r1.audio.sample_rate == 44100);
  CHECK(r1.params.size() == 4);
}

TEST_CASE("chain json roundtrips") {
  DistortionChain chain = default_chain();
  chain.master_seed = 31337;
  chain.specs[2].eta_lo = 0.2;
  chain.specs[2].eta_hi = 0.4;
  auto j = to_json(chain);
  DistortionChain back = chain_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.master_seed == 31337);
  CHECK(back.specs.size() == 4);
  CHECK(back.specs[2].eta_lo == 0.2);
}

TEST_CASE("invalid chain configs are rejected") {
  CHECK_THROWS_AS(chain_from_json(nlohmann::json::array()), std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"specs", {{{"kind", "reverse"}}}}}), std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"specs", {{{"kind", "clip"}, {"eta", {0.5, 1.7}}}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"specs", {{{"kind", "clip"}, {"eta", {0.7, 0.2}}}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"specs", {{{"kind", "clip"}, {"etta", {0.1, 0.2}}}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"specs", {{{"kind", "noise"}, {"noise_kinds", {"brown"}}}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      chain_from_json({{"specs", {{{"kind", "low_bandwidth"}, {"cutoff_hz", {500.0, 9000.0}}}}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"master_seed", "abc"}}), std::invalid_argument);
  CHECK_THROWS_AS(chain_from_json({{"bogus", 1}}), std::invalid_argument);
}
