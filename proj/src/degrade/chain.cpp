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

#include "speechfix/degrade/chain.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "speechfix/degrade/distortions.hpp"
#include "speechfix/degrade/rir.hpp"
#include "speechfix/rng.hpp"
#include "speechfix/synth.hpp"

namespace speechfix::degrade {

namespace {

void require_range(double lo, double hi, const char* what) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument(std::string("invalid range for ") + what);
}

void read_range(const nlohmann::json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    throw std::invalid_argument(std::string("chain config: ") + key + " must be [lo, hi]");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

std::vector<std::string> read_string_list(const nlohmann::json& j, const char* key,
                                          std::vector<std::string> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.empty())
    throw std::invalid_argument(std::string("chain config: ") + key +
                                " must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& v : a) {
    if (!v.is_string())
      throw std::invalid_argument(std::string("chain config: ") + key + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("chain config: unknown key \"" + it.key() + "\"");
}

}  // namespace

DistortionChain default_chain() {
  DistortionChain chain;
  chain.specs.resize(4);
  chain.specs[0].kind = "reverb";
  chain.specs[1].kind = "noise";
  chain.specs[2].kind = "clip";
  chain.specs[3].kind = "low_bandwidth";
  return chain;
}

void validate(const DistortionSpec& spec) {
  if (spec.kind == "noise") {
    require_range(spec.snr_lo, spec.snr_hi, "snr_db");
    if (spec.noise_kinds.empty())
      throw std::invalid_argument("noise spec needs at least one noise kind");
    for (const auto& k : spec.noise_kinds) {
      const auto& known = synth::noise_kinds();
      if (std::find(known.begin(), known.end(), k) == known.end())
        throw std::invalid_argument("unknown noise kind: " + k);
    }
  } else if (spec.kind == "reverb") {
    require_range(spec.rt60_lo, spec.rt60_hi, "rt60");
    require_range(spec.wet_lo, spec.wet_hi, "wet");
    if (!(spec.rt60_lo > 0.0)) throw std::invalid_argument("rt60 range must be positive");
    if (spec.wet_lo < 0.0 || spec.wet_hi > 1.0)
      throw std::invalid_argument("wet range must lie in [0, 1]");
  } else if (spec.kind == "clip") {
    require_range(spec.eta_lo, spec.eta_hi, "eta");
    if (spec.eta_lo < 0.0 || spec.eta_hi > 1.0)
      throw std::invalid_argument("eta range must lie in [0, 1]");
  } else if (spec.kind == "low_bandwidth") {
    require_range(spec.cutoff_lo, spec.cutoff_hi, "cutoff_hz");
    // Target rate 2x cutoff must stay within [2000, 44100] Hz.
    if (spec.cutoff_lo < 1000.0 || spec.cutoff_hi > 22050.0)
      throw std::invalid_argument("cutoff range must lie in [1000, 22050] Hz");
    if (spec.filter_kinds.empty())
      throw std::invalid_argument("low_bandwidth spec needs at least one filter kind");
    for (const auto& k : spec.filter_kinds) dsp::lowpass_kind_from_string(k);
  } else {
    throw std::invalid_argument("unknown distortion kind: " + spec.kind);
  }
}

void validate(const DistortionChain& chain) {
  for (const auto& spec : chain.specs) validate(spec);
}

nlohmann::json to_json(const DistortionSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  if (spec.kind == "noise") {
    j["snr_db"] = {spec.snr_lo, spec.snr_hi};
    j["noise_kinds"] = spec.noise_kinds;
  } else if (spec.kind == "reverb") {
    j["rt60"] = {spec.rt60_lo, spec.rt60_hi};
    j["wet"] = {spec.wet_lo, spec.wet_hi};
  } else if (spec.kind == "clip") {
    j["eta"] = {spec.eta_lo, spec.eta_hi};
  } else if (spec.kind == "low_bandwidth") {
    j["cutoff_hz"] = {spec.cutoff_lo, spec.cutoff_hi};
    j["filter_kinds"] = spec.filter_kinds;
  }
  return j;
}

nlohmann::json to_json(const DistortionChain& chain) {
  nlohmann::json j;
  j["master_seed"] = chain.master_seed;
  j["restore_rate"] = chain.restore_rate;
  j["specs"] = nlohmann::json::array();
  for (const auto& spec : chain.specs) j["specs"].push_back(to_json(spec));
  return j;
}

DistortionSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("chain config: each spec needs a string \"kind\"");
  DistortionSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "noise") {
    reject_unknown_keys(j, {"kind", "snr_db", "noise_kinds"});
    read_range(j, "snr_db", spec.snr_lo, spec.snr_hi);
    spec.noise_kinds = read_string_list(j, "noise_kinds", spec.noise_kinds);
  } else if (spec.kind == "reverb") {
    reject_unknown_keys(j, {"kind", "rt60", "wet"});
    read_range(j, "rt60", spec.rt60_lo, spec.rt60_hi);
    read_range(j, "wet", spec.wet_lo, spec.wet_hi);
  } else if (spec.kind == "clip") {
    reject_unknown_keys(j, {"kind", "eta"});
    read_range(j, "eta", spec.eta_lo, spec.eta_hi);
  } else if (spec.kind == "low_bandwidth") {
    reject_unknown_keys(j, {"kind", "cutoff_hz", "filter_kinds"});
    read_range(j, "cutoff_hz", spec.cutoff_lo, spec.cutoff_hi);
    spec.filter_kinds = read_string_list(j, "filter_kinds", spec.filter_kinds);
  }
  validate(spec);
  return spec;
}

DistortionChain chain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("chain config must be a JSON object");
  reject_unknown_keys(j, {"master_seed", "restore_rate", "specs"});
  DistortionChain chain;
  chain.specs.clear();
  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_unsigned() && !j.at("master_seed").is_number_integer())
      throw std::invalid_argument("chain config: master_seed must be an integer");
    chain.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("restore_rate")) {
    if (!j.at("restore_rate").is_boolean())
      throw std::invalid_argument("chain config: restore_rate must be a boolean");
    chain.restore_rate = j.at("restore_rate").get<bool>();
  }
  if (j.contains("specs")) {
    if (!j.at("specs").is_array())
      throw std::invalid_argument("chain config: specs must be an array");
    for (const auto& s : j.at("specs")) chain.specs.push_back(spec_from_json(s));
  }
  return chain;
}

ComposeResult compose(const DistortionChain& chain, const AudioSegment& s,
                      std::uint64_t item_index) {
  validate(chain);
  Rng rng(Rng::mix(chain.master_seed, item_index));

  ComposeResult result;
  result.audio = s;

  for (const auto& spec : chain.specs) {
    nlohmann::json entry;
    entry["kind"] = spec.kind;

    if (spec.kind == "reverb") {
      const RoomSpec room = sample_room(rng.next_u64(), spec.rt60_lo, spec.rt60_hi);
      const std::vector<double> rir = simulate_rir(room, s.sample_rate, rng.next_u64());
      const double wet = rng.uniform(spec.wet_lo, spec.wet_hi);
      AudioSegment reverbed = apply_reverb(result.audio, rir);
      if (wet < 1.0) {
        for (std::size_t i = 0; i < reverbed.samples.size(); ++i)
          reverbed.samples[i] = (1.0 - wet) * result.audio.samples[i] + wet * reverbed.samples[i];
      }
      result.audio = std::move(reverbed);
      entry["rt60"] = room.rt60;
      entry["wet"] = wet;
      entry["room"] = {room.dimensions[0], room.dimensions[1], room.dimensions[2]};
      entry["source"] = {room.source_pos[0], room.source_pos[1], room.source_pos[2]};
      entry["mic"] = {room.mic_pos[0], room.mic_pos[1], room.mic_pos[2]};
    } else if (spec.kind == "noise") {
      const std::string kind =
          spec.noise_kinds[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<std::int64_t>(spec.noise_kinds.size()) - 1))];
      const double snr = rng.uniform(spec.snr_lo, spec.snr_hi);
      AudioSegment noise = synth::synth_noise(kind, static_cast<int>(result.audio.size()),
                                              result.audio.sample_rate, rng);
      result.audio = apply_noise(result.audio, noise, snr);
      entry["noise_kind"] = kind;
      entry["snr_db"] = snr;
    } else if (spec.kind == "clip") {
      const double eta = rng.uniform(spec.eta_lo, spec.eta_hi);
      result.audio = apply_clip(result.audio, eta);
      entry["eta"] = eta;
    } else if (spec.kind == "low_bandwidth") {
      const double cutoff = rng.log_uniform(spec.cutoff_lo, spec.cutoff_hi);
      const std::string kind =
          spec.filter_kinds[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<std::int64_t>(spec.filter_kinds.size()) - 1))];
      dsp::LowpassSpec filter;
      filter.kind = dsp::lowpass_kind_from_string(kind);
      result.audio = apply_low_bandwidth(result.audio, cutoff, filter, chain.restore_rate);
      entry["cutoff_hz"] = cutoff;
      entry["filter_kind"] = kind;
      entry["target_rate"] = static_cast<int>(std::lround(2.0 * cutoff));
    }
    result.params.push_back(std::move(entry));
  }
  return result;
}

}  // namespace speechfix::degrade
