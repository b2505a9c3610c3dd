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
#include <vector>

#include "speechfix/audio.hpp"
#include "speechfix/dsp/mel.hpp"
#include "speechfix/matrix.hpp"
#include "speechfix/nn/masknet.hpp"

namespace speechfix::restore {

enum class Estimator { oracle, identity, trained };

struct AnalysisConfig {
  int fft_size = 2048;
  int hop = 441;
  int num_mels = 128;
  double eps = 1e-8;
  Estimator estimator = Estimator::identity;
  // Trained mode uses net when set, otherwise loads checkpoint.
  std::string checkpoint;
  nn::MaskNet* net = nullptr;
};

enum class InversionMethod { pinv_clamped, nnls };

struct SynthesisConfig {
  int griffin_lim_iters = 32;
  InversionMethod inversion = InversionMethod::nnls;
  double momentum = 0.99;
};

// Analysis stage: mel extraction plus mask restoration. identity returns
// X_mel untouched; oracle builds the ideal mask S_mel/(X_mel + eps) from the
// aligned clean target and remultiplies; trained runs the mask net.
dsp::MelSpectrogram analyze(const AudioSegment& x, const AnalysisConfig& cfg,
                            const AudioSegment* target = nullptr);

// Mel-domain magnitudes back to (frames x bins) linear magnitudes. The
// pseudo-inverse route clamps negatives; nnls refines it with per-frame
// projected coordinate descent (cap 200 sweeps, tolerance 1e-8), so its
// residual never exceeds the clamped pseudo-inverse's.
Matrix mel_to_linear(const dsp::MelSpectrogram& mel, const dsp::MelFilterbank& fb,
                     InversionMethod method);

// Phase recovery by alternating ISTFT/STFT projections with magnitude
// replacement, zero initial phase, optional momentum extrapolation. With
// iters == 0 this is exactly the zero-phase ISTFT. residuals, when given,
// receives the spectral-convergence residual after each iteration.
AudioSegment griffin_lim(const Matrix& magnitude, int fft_size, int hop, int sample_rate,
                         int out_len, int iters, double momentum,
                         std::vector<double>* residuals = nullptr);

// Full two-stage restoration; output matches the input length and rate.
AudioSegment restore_pipeline(const AudioSegment& x, const AnalysisConfig& analysis,
                              const SynthesisConfig& synthesis,
                              const AudioSegment* target = nullptr);

}  // namespace speechfix::restore
