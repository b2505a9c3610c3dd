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

#include "json.hpp"
#include "speechfix/audio.hpp"

namespace speechfix::degrade {

// One distortion stage with the ranges its concrete parameters are drawn
// from. Only the fields matching `kind` are consulted.
struct DistortionSpec {
  std::string kind;  // noise | reverb | clip | low_bandwidth

  // noise
  double snr_lo = -5.0, snr_hi = 40.0;
  std::vector<std::string> noise_kinds = {"white", "pink", "hum", "modulated"};

  // reverb (rooms are drawn per item; wet mixes dry/wet output)
  double rt60_lo = 0.05, rt60_hi = 1.0;
  double wet_lo = 1.0, wet_hi = 1.0;

  // clip
  double eta_lo = 0.1, eta_hi = 1.0;

  // low_bandwidth (cutoff drawn log-uniform; target rate is 2x cutoff)
  double cutoff_lo = 1000.0, cutoff_hi = 22050.0;
  std::vector<std::string> filter_kinds = {"windowed_sinc_kaiser"};
};

struct DistortionChain {
  std::vector<DistortionSpec> specs;  // applied in order
  std::uint64_t master_seed = 0;
  bool restore_rate = true;  // resample band-limited output back to 44.1 kHz
};

// reverb -> noise -> clip -> low_bandwidth with default ranges.
DistortionChain default_chain();

void validate(const DistortionSpec& spec);
void validate(const DistortionChain& chain);

nlohmann::json to_json(const DistortionSpec& spec);
nlohmann::json to_json(const DistortionChain& chain);
DistortionSpec spec_from_json(const nlohmann::json& j);
DistortionChain chain_from_json(const nlohmann::json& j);

struct ComposeResult {
  AudioSegment audio;
  // One entry per applied spec with the concrete parameters drawn, in
  // application order; written into corpus manifests.
  nlohmann::json params = nlohmann::json::array();
};

// Applies every spec in chain order with parameters drawn from a stream
// seeded by mix(master_seed, item_index). Identical (chain, seed, index)
// always reproduces the same output bit for bit.
ComposeResult compose(const DistortionChain& chain, const AudioSegment& s,
                      std::uint64_t item_index);

}  // namespace speechfix::degrade
