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

#ifndef ASRPIPE_AUDIO_HPP_
#define ASRPIPE_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace asrpipe {

// Mono audio with samples normalized to [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  uint32_t sample_rate_hz = 0;
};

// Reads a WAV file. Only PCM 16-bit little-endian mono is accepted; anything
// else (other encodings, multi-channel, other bit depths) is rejected with a
// descriptive error. Samples are scaled by 1/32768.
AudioSignal read_wav(const std::string& path);

// Writes PCM 16-bit LE mono WAV; samples are clamped to [-1, 1] and scaled by
// 32767.
void write_wav(const AudioSignal& audio, const std::string& path);

}  // namespace asrpipe

#endif  // ASRPIPE_AUDIO_HPP_
