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

#include "speechfix/audio.hpp"

namespace speechfix::io {

enum class WavFormat { pcm16, float32 };

// RIFF/WAVE reader for PCM16 and IEEE float32, mono or multichannel
// (channels averaged down to mono). 16-bit samples are scaled by 1/32768.
AudioSegment wav_read(const std::string& path);

// pcm16 clamps to [-1, 1] and rounds half away from zero; float32 stores
// the samples exactly (at single precision).
void wav_write(const std::string& path, const AudioSegment& audio,
               WavFormat format = WavFormat::float32);

}  // namespace speechfix::io
