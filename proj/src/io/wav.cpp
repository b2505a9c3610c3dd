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

#include "speechfix/io/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "WAV IO assumes a little-endian host");

namespace speechfix::io {

namespace {

std::uint32_t read_u32(const std::vector<char>& b, std::size_t at) {
  std::uint32_t v;
  std::memcpy(&v, b.data() + at, 4);
  return v;
}

std::uint16_t read_u16(const std::vector<char>& b, std::size_t at) {
  std::uint16_t v;
  std::memcpy(&v, b.data() + at, 2);
  return v;
}

bool tag_is(const std::vector<char>& b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void append_u32(std::string& out, std::uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

void append_u16(std::string& out, std::uint16_t v) {
  out.append(reinterpret_cast<const char*>(&v), 2);
}

}  // namespace

AudioSegment wav_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
    throw std::runtime_error("not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::size_t data_at = 0, data_len = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_len = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size()) {
      const std::string id(bytes.data() + pos, 4);
      throw std::runtime_error("truncated WAV file: incomplete " + id + " chunk in " + path);
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_len < 16) throw std::runtime_error("malformed fmt chunk in " + path);
      audio_format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data_at = body;
      data_len = chunk_len;
      have_data = true;
    }
    pos = body + chunk_len + (chunk_len % 2);  // chunks are word aligned
  }

  if (!have_fmt) throw std::runtime_error("missing fmt chunk in " + path);
  if (!have_data) throw std::runtime_error("missing data chunk in " + path);
  if (channels == 0 || sample_rate == 0)
    throw std::runtime_error("malformed fmt chunk in " + path);

  const bool pcm16 = audio_format == 1 && bits == 16;
  const bool f32 = audio_format == 3 && bits == 32;
  if (!pcm16 && !f32)
    throw std::runtime_error("unsupported WAV format (need PCM16 or float32): " + path);

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t num_frames = data_len / frame_bytes;

  AudioSegment out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.resize(num_frames);
  for (std::size_t f = 0; f < num_frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = data_at + f * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t v;
        std::memcpy(&v, bytes.data() + at, 2);
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, bytes.data() + at, 4);
        acc += static_cast<double>(v);
      }
    }
    out.samples[f] = acc / channels;
  }
  return out;
}

void wav_write(const std::string& path, const AudioSegment& audio, WavFormat format) {
  for (const auto v : audio.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("samples must be finite");
  if (audio.sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");

  const std::uint32_t n = static_cast<std::uint32_t>(audio.samples.size());
  const bool f32 = format == WavFormat::float32;
  const std::uint16_t bytes_per_sample = f32 ? 4 : 2;
  const std::uint32_t data_len = n * bytes_per_sample;

  std::string out;
  out.reserve(data_len + 64);
  out.append("RIFF");
  const std::uint32_t fact_len = f32 ? 12 : 0;  // float files carry a fact chunk
  append_u32(out, 4 + 24 + fact_len + 8 + data_len);
  out.append("WAVE");

  out.append("fmt ");
  append_u32(out, 16);
  append_u16(out, f32 ? 3 : 1);
  append_u16(out, 1);  // mono
  append_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  append_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * bytes_per_sample);
  append_u16(out, bytes_per_sample);
  append_u16(out, f32 ? 32 : 16);

  if (f32) {
    out.append("fact");
    append_u32(out, 4);
    append_u32(out, n);
  }

  out.append("data");
  append_u32(out, data_len);
  if (f32) {
    for (const auto v : audio.samples) {
      const float s = static_cast<float>(v);
      out.append(reinterpret_cast<const char*>(&s), 4);
    }
  } else {
    for (const auto v : audio.samples) {
      const double clamped = std::max(-1.0, std::min(1.0, v));
      long scaled = std::lround(clamped * 32768.0);  // rounds half away from zero
      if (scaled > 32767) scaled = 32767;
      if (scaled < -32768) scaled = -32768;
      const std::int16_t s = static_cast<std::int16_t>(scaled);
      out.append(reinterpret_cast<const char*>(&s), 2);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace speechfix::io
