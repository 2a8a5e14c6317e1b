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

#ifndef ASRPIPE_CHUNKER_HPP_
#define ASRPIPE_CHUNKER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asrpipe/feature_matrix.hpp"

namespace asrpipe {

// Fixed-length window of consecutive frames. Frames [0, valid_frames) copy
// source frames [start_frame, start_frame + valid_frames); the remainder (if
// any) repeats the last valid frame.
struct Chunk {
  std::vector<double> data;  // length * num_dims, row-major
  std::string source_id;
  uint32_t start_frame = 0;
  uint32_t valid_frames = 0;
  uint32_t length = 0;  // T
  uint32_t num_dims = 0;

  double& at(uint32_t frame, uint32_t dim) {
    return data[static_cast<size_t>(frame) * num_dims + dim];
  }
  double at(uint32_t frame, uint32_t dim) const {
    return data[static_cast<size_t>(frame) * num_dims + dim];
  }
};

struct Minibatch {
  std::vector<Chunk> chunks;
  size_t size() const { return chunks.size(); }
};

// Decomposes a feature matrix into chunks of `chunk_len` frames whose starts
// step by stride = chunk_len * (1 - overlap_fraction); the stride must come
// out to a positive integer. Every source frame is covered; the final chunk
// pads by repeating the last valid frame when the sequence does not divide
// evenly. Sequences shorter than chunk_len produce one padded chunk.
std::vector<Chunk> split_chunks(const FeatureMatrix& feats, uint32_t chunk_len,
                                double overlap_fraction);

// Inverse of split_chunks for chunks of a single source: rebuilds the
// original matrix exactly, discarding padding. Overlapping regions may be
// taken from any covering chunk since they are identical by construction.
// Throws on dim mismatches or coverage gaps.
FeatureMatrix reassemble(const std::vector<Chunk>& chunks, uint32_t num_frames);

// Partitions chunks into minibatches of `batch_size` (all full except
// possibly the last). With a seed the chunk order is first permuted by a
// Fisher-Yates shuffle driven by SeededRng; without, source order is kept.
std::vector<Minibatch> make_batches(std::vector<Chunk> chunks, uint32_t batch_size,
                                    std::optional<uint64_t> shuffle_seed);

}  // namespace asrpipe

#endif  // ASRPIPE_CHUNKER_HPP_
