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

#include "json.hpp"
#include "speechfix/degrade/chain.hpp"
#include "speechfix/io/wav.hpp"
#include "speechfix/metrics/report.hpp"
#include "speechfix/nn/optimizer.hpp"
#include "speechfix/restore/pipeline.hpp"

namespace speechfix::harness {

inline constexpr int kConfigSchemaVersion = 1;

struct IoPaths {
  std::string clean_dir;     // simulate: directory of clean source WAVs
  std::string input;         // restore: WAV file or directory to restore
  std::string manifest;      // corpus manifest (train, restore, evaluate)
  std::string restored_dir;  // evaluate: estimates; degraded paths when empty
  std::string checkpoint;    // trained-estimator weights for restore
  std::string out_dir = "runs";
};

struct SimulateSettings {
  // When clean_dir is empty, this many synthetic utterances are generated
  // instead of reading source files.
  int synth_count = 100;
  double synth_seconds = 3.0;
  // Source files are cut into consecutive windows of this length; windows
  // whose RMS falls below min_energy_ratio times the file RMS are skipped.
  double segment_seconds = 3.0;
  double min_energy_ratio = 0.5;
  io::WavFormat wav_format = io::WavFormat::float32;
};

struct RirGenSettings {
  int count = 20;
  double rt60_lo = 0.05;
  double rt60_hi = 1.0;
  int sample_rate = 44100;
};

struct TrainSettings {
  int steps = 2000;
  int checkpoint_every = 500;
  // Each training pair is a random crop of this many frames; 0 trains on
  // whole utterances.
  int crop_frames = 64;
  int base_width = 8;
  int blocks = 2;
  nn::AdamConfig adam;
};

// The single run document: everything a command needs, serializable as one
// JSON object. The FNV-1a hash of the canonical serialization scopes every
// output directory, so runs with different settings never collide.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  degrade::DistortionChain chain;
  restore::AnalysisConfig analysis;
  restore::SynthesisConfig synthesis;
  TrainSettings training;
  SimulateSettings simulate;
  RirGenSettings rir;
  metrics::MetricSet metrics;
  IoPaths io;
};

RunConfig default_config();

// Parses a config document. Absent fields keep their defaults; unknown keys
// and wrong schema versions are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// Reads and parses path; throws std::invalid_argument with a descriptive
// message on IO, syntax, or schema problems.
RunConfig load_config(const std::string& path);

void validate(const RunConfig& cfg);

// FNV-1a (64-bit) over the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::string estimator_name(restore::Estimator e);

}  // namespace speechfix::harness
