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

#include "asrpipe/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace asrpipe {

namespace {

// Positions are drawn 1-based within [1, bound], so start < bound always
// holds; only the length can overrun and gets clipped.
MaskSpan clipped_span(uint64_t start_1based, uint64_t len, uint64_t bound) {
  MaskSpan s;
  const uint64_t start = start_1based - 1;
  s.start = static_cast<uint32_t>(start);
  s.len = static_cast<uint32_t>(std::min(len, bound - start));
  return s;
}

void mark_span(std::vector<char>& flags, const MaskSpan& s) {
  for (uint32_t i = s.start; i < s.start + s.len; ++i) flags[i] = 1;
}

}  // namespace

void parse_mask_spec(const std::string& spec, uint32_t* count, uint32_t* len) {
  const size_t x = spec.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= spec.size()) {
    throw std::invalid_argument("bad mask spec '" + spec + "' (expected e.g. 3x10)");
  }
  try {
    size_t used = 0;
    const unsigned long c = std::stoul(spec.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    size_t used2 = 0;
    const std::string rest = spec.substr(x + 1);
    const unsigned long l = std::stoul(rest, &used2);
    if (used2 != rest.size()) throw std::invalid_argument("");
    *count = static_cast<uint32_t>(c);
    *len = static_cast<uint32_t>(l);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad mask spec '" + spec + "' (expected e.g. 3x10)");
  }
}

AugmentConfig effective_config(const AugmentConfig& cfg, uint64_t global_step) {
  if (global_step >= cfg.warmup_steps) return cfg;
  AugmentConfig eff = cfg;
  if (cfg.max_time_masks >= 1) {
    eff.max_time_masks = std::max<uint32_t>(1, cfg.max_time_masks / 2);
  }
  if (cfg.max_feat_masks >= 1) {
    eff.max_feat_masks = std::max<uint32_t>(1, cfg.max_feat_masks / 2);
  }
  return eff;
}

MaskSample sample_masks(const AugmentConfig& cfg, uint32_t T, uint32_t D, SeededRng& rng) {
  if (T < 1 || D < 1) throw std::invalid_argument("sample_masks: T and D must be >= 1");
  if (!cfg.fm_on_ivec && cfg.logmel_dims > D) {
    throw std::invalid_argument("sample_masks: logmel_dims exceeds feature dim");
  }

  MaskSample sample;
  if (cfg.max_time_masks >= 1) {
    const uint64_t m = rng.next_range(1, cfg.max_time_masks);
    sample.time_masks.reserve(m);
    for (uint64_t i = 0; i < m; ++i) {
      const uint64_t t = rng.next_range(1, T);
      const uint64_t len = rng.next_range(0, cfg.max_time_mask_len);
      sample.time_masks.push_back(clipped_span(t, len, T));
    }
  }
  if (cfg.max_feat_masks >= 1) {
    const uint32_t d_hi = cfg.fm_on_ivec ? D : cfg.logmel_dims;
    const uint64_t n = rng.next_range(1, cfg.max_feat_masks);
    sample.feat_masks.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
      const uint64_t d = rng.next_range(1, d_hi);
      const uint64_t len = rng.next_range(0, cfg.max_feat_mask_len);
      sample.feat_masks.push_back(clipped_span(d, len, d_hi));
    }
  }
  return sample;
}

Chunk apply_masks(const Chunk& chunk, const MaskSample& masks) {
  Chunk out = chunk;
  for (const MaskSpan& s : masks.time_masks) {
    if (s.start + s.len > chunk.length) {
      throw std::invalid_argument("apply_masks: time mask outside chunk");
    }
    std::fill(out.data.begin() + static_cast<size_t>(s.start) * out.num_dims,
              out.data.begin() + static_cast<size_t>(s.start + s.len) * out.num_dims, 0.0);
  }
  for (const MaskSpan& s : masks.feat_masks) {
    if (s.start + s.len > chunk.num_dims) {
      throw std::invalid_argument("apply_masks: feature mask outside chunk dims");
    }
    for (uint32_t t = 0; t < out.length; ++t) {
      double* row = out.data.data() + static_cast<size_t>(t) * out.num_dims;
      std::fill(row + s.start, row + s.start + s.len, 0.0);
    }
  }
  return out;
}

namespace {

Minibatch augment_impl(const Minibatch& batch, const AugmentConfig& cfg,
                       uint64_t global_step, const SeededRng& rng, bool parallel) {
  if (batch.chunks.empty()) return batch;
  const uint32_t T = batch.chunks[0].length;
  const uint32_t D = batch.chunks[0].num_dims;
  for (const Chunk& c : batch.chunks) {
    if (c.length != T || c.num_dims != D) {
      throw std::invalid_argument("augment_batch: heterogeneous chunk shapes");
    }
  }
  const AugmentConfig eff = effective_config(cfg, global_step);
  const SeededRng stepped = rng.fork(global_step);

  Minibatch out;
  out.chunks.resize(batch.chunks.size());
  const int64_t n = static_cast<int64_t>(batch.chunks.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      SeededRng sub = stepped.fork(static_cast<uint64_t>(i));
      out.chunks[i] = apply_masks(batch.chunks[i], sample_masks(eff, T, D, sub));
    }
  } else {
    for (int64_t i = 0; i < n; ++i) {
      SeededRng sub = stepped.fork(static_cast<uint64_t>(i));
      out.chunks[i] = apply_masks(batch.chunks[i], sample_masks(eff, T, D, sub));
    }
  }
  return out;
}

MaskStats stats_impl(const AugmentConfig& cfg, uint32_t T, uint32_t D, uint64_t trials,
                     const SeededRng& rng, bool parallel) {
  if (trials < 1) throw std::invalid_argument("mask_statistics: trials must be >= 1");
  if (T < 1 || D < 1) throw std::invalid_argument("mask_statistics: T and D must be >= 1");

  // Per-trial fractions are buffered and reduced in trial order afterwards so
  // that the result does not depend on the thread count.
  std::vector<double> time_frac(trials), dim_frac(trials);
  std::vector<uint64_t> hist(D, 0);

  const int64_t n = static_cast<int64_t>(trials);
#pragma omp parallel if (parallel)
  {
    std::vector<uint64_t> local_hist(D, 0);
    std::vector<char> tflags, dflags;
#pragma omp for schedule(static)
    for (int64_t t = 0; t < n; ++t) {
      SeededRng sub = rng.fork(static_cast<uint64_t>(t));
      const MaskSample s = sample_masks(cfg, T, D, sub);
      tflags.assign(T, 0);
      dflags.assign(D, 0);
      for (const MaskSpan& m : s.time_masks) mark_span(tflags, m);
      for (const MaskSpan& m : s.feat_masks) mark_span(dflags, m);
      uint32_t tm = 0, dm = 0;
      for (char f : tflags) tm += f;
      for (uint32_t d = 0; d < D; ++d) {
        dm += dflags[d];
        local_hist[d] += dflags[d];
      }
      time_frac[t] = static_cast<double>(tm) / T;
      dim_frac[t] = static_cast<double>(dm) / D;
    }
#pragma omp critical
    {
      for (uint32_t d = 0; d < D; ++d) hist[d] += local_hist[d];
    }
  }

  MaskStats st;
  st.trials = trials;
  st.dim_mask_counts = std::move(hist);
  double tsum = 0.0, dsum = 0.0;
  for (uint64_t t = 0; t < trials; ++t) {
    tsum += time_frac[t];
    dsum += dim_frac[t];
    st.max_time_fraction = std::max(st.max_time_fraction, time_frac[t]);
    st.max_dim_fraction = std::max(st.max_dim_fraction, dim_frac[t]);
  }
  st.mean_time_fraction = tsum / static_cast<double>(trials);
  st.mean_dim_fraction = dsum / static_cast<double>(trials);
  return st;
}

}  // namespace

Minibatch augment_batch(const Minibatch& batch, const AugmentConfig& cfg,
                        uint64_t global_step, const SeededRng& rng) {
  return augment_impl(batch, cfg, global_step, rng, true);
}

Minibatch augment_batch_serial(const Minibatch& batch, const AugmentConfig& cfg,
                               uint64_t global_step, const SeededRng& rng) {
  return augment_impl(batch, cfg, global_step, rng, false);
}

MaskStats mask_statistics(const AugmentConfig& cfg, uint32_t T, uint32_t D,
                          uint64_t trials, const SeededRng& rng) {
  return stats_impl(cfg, T, D, trials, rng, true);
}

MaskStats mask_statistics_serial(const AugmentConfig& cfg, uint32_t T, uint32_t D,
                                 uint64_t trials, const SeededRng& rng) {
  return stats_impl(cfg, T, D, trials, rng, false);
}

void write_chunk_pgm(const Chunk& chunk, const std::string& path, double lo, double hi) {
  if (chunk.length == 0 || chunk.num_dims == 0) {
    throw std::invalid_argument("write_chunk_pgm: empty chunk");
  }
  if (lo == hi) {
    lo = chunk.data[0];
    hi = chunk.data[0];
    for (double v : chunk.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) hi = lo + 1.0;
  }

  std::string out = "P5\n" + std::to_string(chunk.length) + " " +
                    std::to_string(chunk.num_dims) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(chunk.length) * chunk.num_dims);
  for (uint32_t row = 0; row < chunk.num_dims; ++row) {
    const uint32_t d = chunk.num_dims - 1 - row;  // dim 0 at the bottom
    for (uint32_t t = 0; t < chunk.length; ++t) {
      const double norm = (chunk.at(t, d) - lo) / (hi - lo);
      const int pix = static_cast<int>(std::lround(std::clamp(norm, 0.0, 1.0) * 255.0));
      out.push_back(static_cast<char>(pix));
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace asrpipe
