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

#include "asrpipe/chunker.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "asrpipe/rng.hpp"

namespace asrpipe {

namespace {

uint32_t stride_for(uint32_t chunk_len, double overlap_fraction) {
  if (chunk_len < 2) throw std::invalid_argument("split_chunks: chunk_len must be >= 2");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
    throw std::invalid_argument("split_chunks: overlap_fraction must be in [0, 1)");
  }
  const double s = chunk_len * (1.0 - overlap_fraction);
  const double rounded = std::round(s);
  if (rounded < 1.0 || std::fabs(s - rounded) > 1e-9) {
    throw std::invalid_argument(
        "split_chunks: chunk_len * (1 - overlap) must be a positive integer");
  }
  return static_cast<uint32_t>(rounded);
}

}  // namespace

std::vector<Chunk> split_chunks(const FeatureMatrix& feats, uint32_t chunk_len,
                                double overlap_fraction) {
  if (feats.num_frames == 0) {
    throw std::invalid_argument("split_chunks: empty feature matrix");
  }
  const uint32_t stride = stride_for(chunk_len, overlap_fraction);

  std::vector<Chunk> chunks;
  uint32_t start = 0;
  while (true) {
    Chunk c;
    c.source_id = feats.source_id;
    c.start_frame = start;
    c.length = chunk_len;
    c.num_dims = feats.num_dims;
    c.valid_frames = std::min<uint32_t>(chunk_len, feats.num_frames - start);
    c.data.resize(static_cast<size_t>(chunk_len) * feats.num_dims);
    for (uint32_t t = 0; t < chunk_len; ++t) {
      // past the end of the source, repeat the last valid frame
      const uint32_t src = start + std::min(t, c.valid_frames - 1);
      std::memcpy(c.data.data() + static_cast<size_t>(t) * feats.num_dims,
                  feats.frame(src).data(), feats.num_dims * sizeof(double));
    }
    chunks.push_back(std::move(c));
    if (start + chunk_len >= feats.num_frames) break;
    start += stride;
  }
  return chunks;
}

FeatureMatrix reassemble(const std::vector<Chunk>& chunks, uint32_t num_frames) {
  if (chunks.empty()) throw std::invalid_argument("reassemble: no chunks");
  if (num_frames == 0) throw std::invalid_argument("reassemble: num_frames must be >= 1");
  const uint32_t dims = chunks[0].num_dims;

  FeatureMatrix out;
  out.num_frames = num_frames;
  out.num_dims = dims;
  out.source_id = chunks[0].source_id;
  out.data.assign(static_cast<size_t>(num_frames) * dims, 0.0);
  std::vector<char> covered(num_frames, 0);

  for (const Chunk& c : chunks) {
    if (c.num_dims != dims) throw std::invalid_argument("reassemble: dim mismatch");
    if (c.valid_frames < 1 || c.valid_frames > c.length) {
      throw std::invalid_argument("reassemble: bad valid_frames");
    }
    if (static_cast<uint64_t>(c.start_frame) + c.valid_frames > num_frames) {
      throw std::invalid_argument("reassemble: chunk extends past num_frames");
    }
    for (uint32_t t = 0; t < c.valid_frames; ++t) {
      const uint32_t dst = c.start_frame + t;
      std::memcpy(out.data.data() + static_cast<size_t>(dst) * dims,
                  c.data.data() + static_cast<size_t>(t) * dims, dims * sizeof(double));
      covered[dst] = 1;
    }
  }
  for (uint32_t i = 0; i < num_frames; ++i) {
    if (!covered[i]) {
      throw std::invalid_argument("reassemble: coverage gap at frame " + std::to_string(i));
    }
  }
  return out;
}

std::vector<Minibatch> make_batches(std::vector<Chunk> chunks, uint32_t batch_size,
                                    std::optional<uint64_t> shuffle_seed) {
  if (batch_size < 1) throw std::invalid_argument("make_batches: batch_size must be >= 1");

  if (shuffle_seed.has_value()) {
    // Fisher-Yates; the permutation depends only on the seed.
    SeededRng rng(*shuffle_seed);
    for (size_t i = chunks.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(rng.next_below(i));
      std::swap(chunks[i - 1], chunks[j]);
    }
  }

  std::vector<Minibatch> batches;
  for (size_t pos = 0; pos < chunks.size(); pos += batch_size) {
    Minibatch b;
    const size_t end = std::min(chunks.size(), pos + batch_size);
    b.chunks.assign(std::make_move_iterator(chunks.begin() + pos),
                    std::make_move_iterator(chunks.begin() + end));
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace asrpipe
