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

// Compares the OpenMP kernels against their serial references: wall time,
// speedup, and a value check (the pairs are written to agree bit-exactly).

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "asrpipe/audio.hpp"
#include "asrpipe/augment.hpp"
#include "asrpipe/chunker.hpp"
#include "asrpipe/embedding.hpp"
#include "asrpipe/logmel.hpp"
#include "asrpipe/rng.hpp"

using namespace asrpipe;

namespace {

double time_of(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const std::string& name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name.c_str(), serial_s, parallel_s,
              serial_s / parallel_s, equal ? "values equal" : "VALUES DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled (serial build)\n");
#endif
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  // logmel over two minutes of audio
  {
    AudioSignal a;
    a.sample_rate_hz = 16000;
    a.samples.resize(16000 * 120);
    std::mt19937_64 gen(1);
    for (double& s : a.samples) s = std::uniform_real_distribution<double>(-0.5, 0.5)(gen);
    LogmelOptions opts;
    FeatureMatrix serial, parallel;
    const double ts = time_of([&] { serial = extract_logmel_serial(a, opts); });
    const double tp = time_of([&] { parallel = extract_logmel(a, opts); });
    row("logmel 120s audio", ts, tp, serial.same_values(parallel));
  }

  // masking a batch of 512 chunks
  {
    Minibatch batch;
    std::mt19937_64 gen(2);
    for (int i = 0; i < 512; ++i) {
      Chunk c;
      c.length = 64;
      c.num_dims = 180;
      c.valid_frames = 64;
      c.data.resize(64 * 180);
      for (double& v : c.data) v = std::uniform_real_distribution<double>(0, 1)(gen);
      batch.chunks.push_back(std::move(c));
    }
    AugmentConfig cfg;
    Minibatch serial, parallel;
    const double ts =
        time_of([&] { serial = augment_batch_serial(batch, cfg, 2500, SeededRng(7)); });
    const double tp =
        time_of([&] { parallel = augment_batch(batch, cfg, 2500, SeededRng(7)); });
    bool equal = true;
    for (size_t i = 0; i < batch.chunks.size(); ++i) {
      equal = equal && serial.chunks[i].data == parallel.chunks[i].data;
    }
    row("augment 512 chunks", ts, tp, equal);
  }

  // mask statistics over 2M trials
  {
    AugmentConfig cfg;
    MaskStats serial, parallel;
    const double ts = time_of(
        [&] { serial = mask_statistics_serial(cfg, 64, 180, 2000000, SeededRng(3)); });
    const double tp =
        time_of([&] { parallel = mask_statistics(cfg, 64, 180, 2000000, SeededRng(3)); });
    const bool equal = serial.mean_time_fraction == parallel.mean_time_fraction &&
                       serial.max_time_fraction == parallel.max_time_fraction &&
                       serial.mean_dim_fraction == parallel.mean_dim_fraction &&
                       serial.max_dim_fraction == parallel.max_dim_fraction &&
                       serial.dim_mask_counts == parallel.dim_mask_counts;
    row("mask stats 2M trials", ts, tp, equal);
  }

  // GMM statistics over 200k frames
  {
    std::mt19937_64 gen(4);
    Matrix frames(200000, 20);
    for (double& v : frames.v) v = std::uniform_real_distribution<double>(-2, 2)(gen);
    const UbmTrainResult ubm = ubm_fit(frames, 16, 1, SeededRng(5));
    UbmStats serial, parallel;
    const double ts =
        time_of([&] { serial = accumulate_ubm_stats_serial(ubm.model, frames); });
    const double tp = time_of([&] { parallel = accumulate_ubm_stats(ubm.model, frames); });
    const bool equal = serial.log_likelihood == parallel.log_likelihood &&
                       serial.occupancy == parallel.occupancy &&
                       serial.centered_mean.v == parallel.centered_mean.v;
    row("UBM stats 200k x 20, K=16", ts, tp, equal);
  }

  return 0;
}
