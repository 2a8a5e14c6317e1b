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

#ifndef ASRPIPE_LOGMEL_HPP_
#define ASRPIPE_LOGMEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "asrpipe/audio.hpp"
#include "asrpipe/feature_matrix.hpp"

namespace asrpipe {

// Triangular mel filterbank over FFT power-spectrum bins. Triangles are
// equally spaced on the mel scale mel(f) = 1127 * ln(1 + f/700) between 0 Hz
// and Nyquist and are not area-normalized. Construction fails if some band
// would receive no FFT bin (too many bands for the FFT resolution).
struct MelFilterbank {
  std::vector<double> weights;  // num_bands x num_bins, row-major
  uint32_t num_bands = 0;
  uint32_t fft_size = 0;
  uint32_t sample_rate_hz = 0;

  uint32_t num_bins() const { return fft_size / 2 + 1; }
  double weight(uint32_t band, uint32_t bin) const {
    return weights[static_cast<size_t>(band) * num_bins() + bin];
  }
};

MelFilterbank make_mel_filterbank(uint32_t num_bands, uint32_t fft_size,
                                  uint32_t sample_rate_hz);

// band -> mel energy for one power spectrum (num_bins values).
std::vector<double> apply_filterbank(const MelFilterbank& fb,
                                     const std::vector<double>& power_spectrum);

struct LogmelOptions {
  double window_ms = 25.0;
  double shift_ms = 10.0;
  uint32_t num_bands = 80;
  double log_floor = 1e-10;  // energy floor before the log
};

// Short-time log mel-band energies (natural log). Hann window, FFT size =
// next power of two >= window length, no pre-emphasis. Frame count is
// floor((num_samples - window)/shift) + 1; a signal shorter than one window
// is an error. Frames are processed in parallel.
FeatureMatrix extract_logmel(const AudioSignal& audio, const LogmelOptions& opts,
                             const std::string& source_id = "");

// Serial reference implementation, kept for testing and benchmarking; must
// produce bit-identical output.
FeatureMatrix extract_logmel_serial(const AudioSignal& audio, const LogmelOptions& opts,
                                    const std::string& source_id = "");

namespace detail {
// In-place iterative radix-2 FFT over interleaved complex doubles.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);
uint32_t next_pow2(uint32_t n);
}  // namespace detail

}  // namespace asrpipe

#endif  // ASRPIPE_LOGMEL_HPP_
