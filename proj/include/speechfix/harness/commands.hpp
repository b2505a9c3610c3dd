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

#include <string>

#include "speechfix/harness/config.hpp"

namespace speechfix::harness {

// Output directory for a command run: <out_dir>/<command>-<config hash>.
// Hash scoping keeps artifacts from different configs from colliding, and
// identical configs land on (and deterministically overwrite) the same
// directory. The effective config is written inside as config.json.
std::string run_dir(const RunConfig& cfg, const std::string& command);

// Commands return a process exit code: 0 on success, 1 when some items
// failed but the run completed. Unusable configurations (missing inputs,
// invalid settings) throw std::invalid_argument, which the CLI maps to 2.
//
// Degrades a clean corpus with the configured chain and writes clean/,
// degraded/ and manifest.csv. Sources come from io.clean_dir, cut into
// simulate.segment_seconds windows with min-energy gating; with no clean_dir
// the corpus is synthesized (simulate.synth_count utterances).
int cmd_simulate(const RunConfig& cfg);

// Simulates rir.count random rooms and writes a WAV bank plus rirs.json.
int cmd_rir_gen(const RunConfig& cfg);

// Trains the mask net on (degraded, clean) mel pairs drawn from the
// manifest corpus; writes periodic checkpoints, ckpt-final.bin and loss.csv.
int cmd_train(const RunConfig& cfg);

// Restores io.input (file or directory) or the manifest's degraded items.
// Outputs are tagged <stem>.<estimator>.wav. The identity estimator is the
// unprocessed baseline and copies waveforms through untouched; oracle needs
// the manifest for aligned clean targets; trained needs io.checkpoint.
int cmd_restore(const RunConfig& cfg);

// Scores estimates against the manifest's clean references and writes
// report.json and report.csv. Estimates come from io.restored_dir, or the
// manifest's degraded paths when it is empty (unprocessed scoring). Exit
// code 0 only when every pair evaluated.
int cmd_evaluate(const RunConfig& cfg);

}  // namespace speechfix::harness
