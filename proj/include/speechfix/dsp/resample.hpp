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

#include "speechfix/audio.hpp"

namespace speechfix::dsp {

// Band-limited sample rate conversion with a Kaiser-windowed sinc
// interpolator evaluated on the fly. The anti-alias cutoff is
// 0.95 * min(input_rate, target_rate) / 2. Output length is
// round(input_length * target_rate / input_rate). When the rates match the
// input is returned unchanged.
AudioSegment resample(const AudioSegment& audio, int target_rate);

}  // namespace speechfix::dsp
