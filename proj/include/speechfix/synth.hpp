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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speechfix/audio.hpp"
#include "speechfix/rng.hpp"

namespace speechfix::synth {

// Noise generators used by the degradation chain. Kinds:
//   white      flat spectrum
//   pink       ~1/f spectrum (three-pole approximation)
//   hum        mains hum: 50 Hz fundamental plus harmonics and a low floor
//   modulated  white noise with slow sinusoidal amplitude modulation
// Output is roughly unit-RMS; the mixer rescales for the target SNR anyway.
AudioSegment synth_noise(const std::string& kind, int len, int sample_rate, Rng& rng);

const std::vector<std::string>& noise_kinds();

// Parametric speech: a glottal pulse train driven through cascaded formant
// resonators, interleaved with fricatives, plosive bursts and pauses. The
// result is not a natural voice, but it has speech-like spectral tilt,
// harmonic structure, modulation rate and crest factor, which is what the
// degradation and restoration metrics care about. Deterministic per seed.
// Peak-normalized to 0.95 with a -38 dBFS pink room tone.
AudioSegment synth_speech(std::uint64_t seed, double duration_s, int sample_rate);

}  // namespace speechfix::synth
