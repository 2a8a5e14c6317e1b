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

#ifndef ASRPIPE_AUGMENT_HPP_
#define ASRPIPE_AUGMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "asrpipe/chunker.hpp"
#include "asrpipe/rng.hpp"

namespace asrpipe {

// Masking parameters in the M x dt / N x dd convention: up to
// max_time_masks time masks of up to max_time_mask_len frames each, and up
// to max_feat_masks feature masks of up to max_feat_mask_len dims each.
// When fm_on_ivec is false, feature masks are confined to the leading
// logmel_dims dims and never touch the trailing embedding dims.
struct AugmentConfig {
  uint32_t max_time_masks = 6;      // M
  uint32_t max_time_mask_len = 5;   // max time-mask length, frames
  uint32_t max_feat_masks = 5;      // N
  uint32_t max_feat_mask_len = 18;  // max feature-mask length, dims
  bool fm_on_ivec = true;
  uint32_t warmup_steps = 2000;
  uint32_t logmel_dims = 80;
};

// Parses the "MxL" command-line notation, e.g. "3x10" -> (3, 10).
void parse_mask_spec(const std::string& spec, uint32_t* count, uint32_t* len);

// Default max feature-mask length: 10% of the feature dimension.
inline uint32_t default_feat_mask_len(uint32_t num_dims) { return num_dims / 10; }

// One realized mask set. Spans are stored 0-based and already clipped to the
// allowed range, so a span may be shorter than the sampled length (or empty).
struct MaskSpan {
  uint32_t start = 0;
  uint32_t len = 0;
};

struct MaskSample {
  std::vector<MaskSpan> time_masks;
  std::vector<MaskSpan> feat_masks;
  bool empty() const { return time_masks.empty() && feat_masks.empty(); }
};

// Warmup rule: in the first warmup_steps steps the mask counts are halved,
// M' = max(1, M/2) and N' = max(1, N/2) (counts of 0 stay 0); mask lengths
// are never altered. From step warmup_steps on, the config is returned
// unchanged.
AugmentConfig effective_config(const AugmentConfig& cfg, uint64_t global_step);

// Samples one mask set for a T x D chunk. Draw order is fixed so that the
// sequence can be replicated from the seed alone:
//   1. if M >= 1: m = rng.next_range(1, M), else m = 0
//   2. m times: t = rng.next_range(1, T), then len = rng.next_range(0, dt_max)
//   3. if N >= 1: n = rng.next_range(1, N), else n = 0
//   4. n times: d = rng.next_range(1, d_hi), then len = rng.next_range(0, dd_max)
// where d_hi = D when fm_on_ivec, else logmel_dims. Positions are 1-based at
// draw time; stored spans are 0-based, clipped to [0, T) resp. the allowed
// dim range.
MaskSample sample_masks(const AugmentConfig& cfg, uint32_t T, uint32_t D, SeededRng& rng);

// Zeroes the masked cells: each time mask clears whole frames, each feature
// mask clears whole dims. Everything else is copied bit-identically; the
// input chunk is left untouched.
Chunk apply_masks(const Chunk& chunk, const MaskSample& masks);

// Masks every chunk of a batch independently: chunk i draws from the
// sub-stream rng.fork(global_step).fork(i), with effective_config applied.
// Pure in (rng state, step, batch contents); chunk order preserved; chunks
// are processed in parallel. All chunks must share (T, D).
Minibatch augment_batch(const Minibatch& batch, const AugmentConfig& cfg,
                        uint64_t global_step, const SeededRng& rng);

// Serial reference, bit-identical to augment_batch.
Minibatch augment_batch_serial(const Minibatch& batch, const AugmentConfig& cfg,
                               uint64_t global_step, const SeededRng& rng);

// Monte-Carlo masking statistics. Trial t samples from rng.fork(t); results
// are deterministic given the seed and independent of thread count (per-trial
// fractions are reduced in trial order, histogram merges are integer sums).
struct MaskStats {
  uint64_t trials = 0;
  double mean_time_fraction = 0.0;  // fraction of frames masked, averaged
  double max_time_fraction = 0.0;
  double mean_dim_fraction = 0.0;  // fraction of dims masked, averaged
  double max_dim_fraction = 0.0;
  std::vector<uint64_t> dim_mask_counts;  // trials in which dim d was masked
};

MaskStats mask_statistics(const AugmentConfig& cfg, uint32_t T, uint32_t D,
                          uint64_t trials, const SeededRng& rng);
MaskStats mask_statistics_serial(const AugmentConfig& cfg, uint32_t T, uint32_t D,
                                 uint64_t trials, const SeededRng& rng);

// Portable graymap (PGM P5) dump of a chunk, one pixel per cell; dims run
// top to bottom (dim 0 at the bottom row), frames left to right. Values are
// scaled to 0..255 over [lo, hi]; pass lo == hi to scale over the chunk's
// own range.
void write_chunk_pgm(const Chunk& chunk, const std::string& path,
                     double lo = 0.0, double hi = 0.0);

}  // namespace asrpipe

#endif  // ASRPIPE_AUGMENT_HPP_
