// Copyright 2026 The asrpipe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asrpipe/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace asrpipe {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

}  // namespace

AudioSignal read_wav(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file_bytes(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t audio_format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t size = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size()) {
      throw std::runtime_error("truncated WAV chunk in " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw std::runtime_error("malformed fmt chunk in " + path);
      audio_format = read_u16(bytes.data() + pos);
      channels = read_u16(bytes.data() + pos + 2);
      sample_rate = read_u32(bytes.data() + pos + 4);
      bits = read_u16(bytes.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_size = size;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    throw std::runtime_error("WAV file missing fmt or data chunk: " + path);
  }
  if (audio_format != 1) {
    throw std::runtime_error("unsupported WAV encoding (PCM required): " + path);
  }
  if (channels != 1) {
    throw std::runtime_error("unsupported channel count (mono required): " + path);
  }
  if (bits != 16) {
    throw std::runtime_error("unsupported sample width (16-bit required): " + path);
  }
  if (sample_rate == 0) {
    throw std::runtime_error("invalid sample rate in " + path);
  }

  AudioSignal out;
  out.sample_rate_hz = sample_rate;
  const uint32_t n = data_size / 2;
  out.samples.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    const int16_t s = static_cast<int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
    out.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return out;
}

void write_wav(const AudioSignal& audio, const std::string& path) {
  if (audio.sample_rate_hz == 0) {
    throw std::invalid_argument("write_wav: sample rate must be positive");
  }
  const uint32_t n = static_cast<uint32_t>(audio.samples.size());
  const uint32_t data_size = n * 2;

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  put_u32(out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, audio.sample_rate_hz);
  put_u32(out, audio.sample_rate_hz * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.append("data");
  put_u32(out, data_size);
  for (uint32_t i = 0; i < n; ++i) {
    const double clamped = std::clamp(audio.samples[i], -1.0, 1.0);
    const int16_t s = static_cast<int16_t>(std::lrint(clamped * 32767.0));
    put_u16(out, static_cast<uint16_t>(s));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace asrpipe
