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

#ifndef ASRPIPE_FEATURE_MATRIX_HPP_
#define ASRPIPE_FEATURE_MATRIX_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace asrpipe {

struct SpeakerEmbedding;

// Frames x dims grid of feature values, row-major. The value payload of the
// on-disk FMX1 format is 32-bit float; in memory we keep doubles (every value
// read from a file is exactly float-representable, so file round-trips stay
// bit-exact).
struct FeatureMatrix {
  std::vector<double> data;  // num_frames * num_dims, row-major
  uint32_t num_frames = 0;
  uint32_t num_dims = 0;
  double frame_shift_ms = 0.0;
  std::string source_id;

  double& at(uint32_t frame, uint32_t dim) {
    return data[static_cast<size_t>(frame) * num_dims + dim];
  }
  double at(uint32_t frame, uint32_t dim) const {
    return data[static_cast<size_t>(frame) * num_dims + dim];
  }
  std::span<const double> frame(uint32_t i) const {
    return {data.data() + static_cast<size_t>(i) * num_dims, num_dims};
  }
  std::span<double> frame(uint32_t i) {
    return {data.data() + static_cast<size_t>(i) * num_dims, num_dims};
  }

  bool same_values(const FeatureMatrix& other) const;
};

// FMX1 feature file format, little-endian throughout:
//   bytes 0..3   magic "FMX1"
//   u32          num_frames
//   u32          num_dims
//   u32          frame shift in microseconds
//   f32[]        num_frames * num_dims values, row-major
// Values are converted double <-> f32 at the boundary; reading then writing a
// file reproduces it byte for byte.
void write_fmx(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_fmx(const std::string& path);

// Concatenates a symmetric window of `context` frames (odd, >= 1) onto every
// frame; boundary frames replicate the first/last frame. Output dims =
// context * input dims, frame count unchanged.
FeatureMatrix stack_context(const FeatureMatrix& feats, uint32_t context);

// Appends the per-recording embedding to every frame. The embedding occupies
// the trailing dims and is identical across frames. Throws if the recording
// ids do not match.
FeatureMatrix concat_embedding(const FeatureMatrix& feats, const SpeakerEmbedding& emb);

// Stacks matrices vertically (same dims required).
FeatureMatrix concat_frames(const std::vector<const FeatureMatrix*>& parts);

}  // namespace asrpipe

#endif  // ASRPIPE_FEATURE_MATRIX_HPP_
