/* Copyright 2026 The BECR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "becr/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "becr/errors.hpp"

namespace becr {

namespace {

std::uint16_t read_u16le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::int16_t read_s16le(const std::uint8_t* p) {
  return static_cast<std::int16_t>(read_u16le(p));
}

float read_f32le(const std::uint8_t* p) {
  return std::bit_cast<float>(read_u32le(p));
}

bool chunk_id_is(const std::uint8_t* p, const char* id) {
  return std::memcmp(p, id, 4) == 0;
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 12) throw ParseError(path + ": truncated RIFF header");
  if (!chunk_id_is(bytes.data(), "RIFF") || !chunk_id_is(bytes.data() + 8, "WAVE")) {
    throw UnsupportedFormatError(path + ": not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool fmt_found = false;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;
  bool data_found = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* header = bytes.data() + pos;
    const std::uint32_t chunk_len = read_u32le(header + 4);
    pos += 8;
    if (pos + chunk_len > bytes.size()) {
      throw ParseError(path + ": truncated chunk near byte " + std::to_string(pos - 8));
    }
    if (chunk_id_is(header, "fmt ")) {
      if (chunk_len < 16) throw ParseError(path + ": fmt chunk too short");
      const std::uint8_t* p = bytes.data() + pos;
      fmt.format = read_u16le(p);
      fmt.channels = read_u16le(p + 2);
      fmt.sample_rate = read_u32le(p + 4);
      fmt.bits = read_u16le(p + 14);
      fmt_found = true;
    } else if (chunk_id_is(header, "data")) {
      data_offset = pos;
      data_size = chunk_len;
      data_found = true;
    }
    pos += chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!fmt_found) throw ParseError(path + ": missing fmt chunk");
  if (!data_found) throw ParseError(path + ": missing data chunk");

  const bool pcm16 = fmt.format == 1 && fmt.bits == 16;
  const bool float32 = fmt.format == 3 && fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw UnsupportedFormatError(path + ": unsupported format code " +
                                 std::to_string(fmt.format) + " with " +
                                 std::to_string(fmt.bits) + " bits per sample");
  }
  if (fmt.channels < 1 || fmt.channels > 2) {
    throw UnsupportedFormatError(path + ": unsupported channel count " +
                                 std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) throw ParseError(path + ": zero sample rate");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_size = bytes_per_sample * fmt.channels;
  if (data_size % frame_size != 0) {
    throw ParseError(path + ": data size is not a whole number of frames");
  }
  const std::size_t n_frames = data_size / frame_size;
  if (n_frames == 0) throw InvalidInputError(path + ": no audio samples");

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(fmt.sample_rate);
  audio.samples.resize(n_frames);
  const std::uint8_t* data = bytes.data() + data_offset;
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t ch = 0; ch < fmt.channels; ++ch) {
      const std::uint8_t* p = data + i * frame_size + ch * bytes_per_sample;
      if (pcm16) {
        acc += read_s16le(p) / 32768.0;
      } else {
        acc += read_f32le(p);
      }
    }
    audio.samples[i] = acc / fmt.channels;
  }
  validate_audio(audio);
  return audio;
}

}  // namespace becr
