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

#include <array>
#include <cstdint>
#include <vector>

namespace speechfix::degrade {

struct RoomSpec {
  std::array<double, 3> dimensions{6.0, 5.0, 4.0};  // meters
  std::array<double, 3> source_pos{2.0, 2.5, 1.5};
  std::array<double, 3> mic_pos{4.0, 2.0, 2.0};
  double rt60 = 0.5;    // seconds
  int max_order = 200;  // reflection count cap
};

enum class AbsorptionModel {
  // Solves the wall absorption from Eyring's formula. The image-source
  // energy decay is exponential in the per-bounce factor (1 - alpha), which
  // is exactly Eyring's assumption, so simulated RT60 tracks the request
  // across the whole feasible range.
  eyring,
  // Classic Sabine inversion alpha = 0.161 V / (rt60 S). Diverges from the
  // measured decay as alpha grows (up to ~40% short at alpha near 1).
  sabine,
};

struct RirOptions {
  AbsorptionModel absorption = AbsorptionModel::sabine;
  // When >= 0, overrides the rt60-derived wall absorption (1.0 = anechoic).
  // Disables the decay correction below.
  double fixed_absorption = -1.0;
  // Bare image-source decay in a rectangular room is slower than either
  // diffuse-field formula predicts (grazing images along the longest axis
  // dominate the late tail), by 20-40% depending on geometry. When set, the
  // simulated response is re-measured with the Schroeder integral and scaled
  // by the exponential that closes the gap, so the delivered RT60 tracks the
  // request to within a few percent.
  bool match_rt60 = true;
};

// Image-source impulse response for a rectangular room with uniform wall
// absorption and an omnidirectional microphone. Image amplitudes follow
// beta^reflections / (4 pi d); fractional delays are splatted with a
// Hann-windowed sinc. The seed jitters higher-order image positions by a few
// millimeters to break up sweeping-echo artifacts. Output length is at least
// rt60 * sample_rate samples.
//
// Throws "infeasible RT60" when Sabine absorption exceeds 1 (the room is too
// small to decay that fast).
std::vector<double> simulate_rir(const RoomSpec& room, int sample_rate, std::uint64_t seed,
                                 const RirOptions& options = {});

// Random room: dimensions uniform in [3, 10] m per axis, rt60 uniform in
// [rt60_lo, rt60_hi], source and mic at least 0.5 m from every wall and at
// least 0.3 m apart. Infeasible rt60/size combinations are rejected and
// redrawn, never thrown.
RoomSpec sample_room(std::uint64_t seed, double rt60_lo = 0.05, double rt60_hi = 1.0);

// Sabine absorption for the room: 0.161 V / (rt60 S).
double sabine_absorption(const RoomSpec& room);

// RT60 from the Schroeder backward energy integral, fitting the -5..-25 dB
// span of the decay curve and extrapolating to -60 dB.
double estimate_rt60_schroeder(const std::vector<double>& rir, int sample_rate);

}  // namespace speechfix::degrade
