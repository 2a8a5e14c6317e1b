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

#include "asrpipe/logmel.hpp"

#include <cmath>
#include <stdexcept>

namespace asrpipe {

namespace {

constexpr double kPi = 3.14159265358979323846;

double freq_to_mel(double f) { return 1127.0 * std::log(1.0 + f / 700.0); }

struct FrameSetup {
  uint32_t window_samples = 0;
  uint32_t shift_samples = 0;
  uint32_t num_frames = 0;
  std::vector<double> window;  // Hann
};

FrameSetup prepare_frames(const AudioSignal& audio, const LogmelOptions& opts) {
  if (audio.samples.empty()) throw std::invalid_argument("extract_logmel: empty signal");
  if (audio.sample_rate_hz == 0) throw std::invalid_argument("extract_logmel: invalid sample rate");
  if (opts.shift_ms <= 0 || opts.window_ms < opts.shift_ms) {
    throw std::invalid_argument("extract_logmel: need window_ms >= shift_ms > 0");
  }
  if (opts.num_bands < 1) throw std::invalid_argument("extract_logmel: need num_bands >= 1");
  for (double s : audio.samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("invalid audio: non-finite sample");
  }

  FrameSetup fs;
  fs.window_samples =
      static_cast<uint32_t>(std::lround(opts.window_ms * 1e-3 * audio.sample_rate_hz));
  fs.shift_samples =
      static_cast<uint32_t>(std::lround(opts.shift_ms * 1e-3 * audio.sample_rate_hz));
  if (fs.window_samples < 2 || fs.shift_samples < 1) {
    throw std::invalid_argument("extract_logmel: window/shift too small for sample rate");
  }
  if (audio.samples.size() < fs.window_samples) {
    throw std::invalid_argument("signal too short: " + std::to_string(audio.samples.size()) +
                                " samples < one window of " +
                                std::to_string(fs.window_samples));
  }
  fs.num_frames = static_cast<uint32_t>(
      (audio.samples.size() - fs.window_samples) / fs.shift_samples + 1);

  fs.window.resize(fs.window_samples);
  for (uint32_t n = 0; n < fs.window_samples; ++n) {
    fs.window[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / (fs.window_samples - 1));
  }
  return fs;
}

// One frame: window, zero-padded FFT, power spectrum, filterbank, floored log.
void compute_frame(const AudioSignal& audio, const FrameSetup& fs,
                   const MelFilterbank& fb, double log_floor, uint32_t frame,
                   double* out) {
  const uint32_t nfft = fb.fft_size;
  std::vector<double> re(nfft, 0.0), im(nfft, 0.0);
  const size_t base = static_cast<size_t>(frame) * fs.shift_samples;
  for (uint32_t n = 0; n < fs.window_samples; ++n) {
    re[n] = audio.samples[base + n] * fs.window[n];
  }
  detail::fft_radix2(re, im);

  std::vector<double> power(fb.num_bins());
  for (uint32_t k = 0; k < fb.num_bins(); ++k) {
    power[k] = re[k] * re[k] + im[k] * im[k];
  }
  const std::vector<double> mel = apply_filterbank(fb, power);
  for (uint32_t b = 0; b < fb.num_bands; ++b) {
    out[b] = std::log(std::max(mel[b], log_floor));
  }
}

FeatureMatrix extract_impl(const AudioSignal& audio, const LogmelOptions& opts,
                           const std::string& source_id, bool parallel) {
  const FrameSetup fs = prepare_frames(audio, opts);
  const uint32_t nfft = detail::next_pow2(fs.window_samples);
  const MelFilterbank fb = make_mel_filterbank(opts.num_bands, nfft, audio.sample_rate_hz);

  FeatureMatrix out;
  out.num_frames = fs.num_frames;
  out.num_dims = opts.num_bands;
  out.frame_shift_ms = opts.shift_ms;
  out.source_id = source_id;
  out.data.resize(static_cast<size_t>(fs.num_frames) * opts.num_bands);

  const int64_t n = fs.num_frames;
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      compute_frame(audio, fs, fb, opts.log_floor, static_cast<uint32_t>(i),
                    out.data.data() + i * opts.num_bands);
    }
  } else {
    for (int64_t i = 0; i < n; ++i) {
      compute_frame(audio, fs, fb, opts.log_floor, static_cast<uint32_t>(i),
                    out.data.data() + i * opts.num_bands);
    }
  }
  return out;
}

}  // namespace

namespace detail {

uint32_t next_pow2(uint32_t n) {
  uint32_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n) {
    throw std::invalid_argument("fft_radix2: size must be a power of two");
  }
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        const size_t a = i + k, b = i + k + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

}  // namespace detail

MelFilterbank make_mel_filterbank(uint32_t num_bands, uint32_t fft_size,
                                  uint32_t sample_rate_hz) {
  if (num_bands < 1 || fft_size < 4 || sample_rate_hz == 0) {
    throw std::invalid_argument("make_mel_filterbank: bad parameters");
  }
  MelFilterbank fb;
  fb.num_bands = num_bands;
  fb.fft_size = fft_size;
  fb.sample_rate_hz = sample_rate_hz;
  const uint32_t bins = fb.num_bins();
  fb.weights.assign(static_cast<size_t>(num_bands) * bins, 0.0);

  // num_bands + 2 edge points equally spaced on the mel scale from 0 to
  // Nyquist; band b rises over [edge_b, edge_{b+1}] and falls over
  // [edge_{b+1}, edge_{b+2}].
  const double mel_hi = freq_to_mel(sample_rate_hz / 2.0);
  std::vector<double> edges(num_bands + 2);
  for (uint32_t j = 0; j < num_bands + 2; ++j) {
    edges[j] = mel_hi * static_cast<double>(j) / static_cast<double>(num_bands + 1);
  }

  const double hz_per_bin = static_cast<double>(sample_rate_hz) / fft_size;
  for (uint32_t b = 0; b < num_bands; ++b) {
    bool any = false;
    for (uint32_t k = 0; k < bins; ++k) {
      const double mel = freq_to_mel(k * hz_per_bin);
      double w = 0.0;
      if (mel > edges[b] && mel < edges[b + 1]) {
        w = (mel - edges[b]) / (edges[b + 1] - edges[b]);
      } else if (mel >= edges[b + 1] && mel < edges[b + 2]) {
        w = (edges[b + 2] - mel) / (edges[b + 2] - edges[b + 1]);
      }
      if (w > 0.0) {
        fb.weights[static_cast<size_t>(b) * bins + k] = w;
        any = true;
      }
    }
    if (!any) {
      throw std::invalid_argument(
          "make_mel_filterbank: band " + std::to_string(b) +
          " has no FFT bin; too many bands for fft_size " + std::to_string(fft_size));
    }
  }
  return fb;
}

std::vector<double> apply_filterbank(const MelFilterbank& fb,
                                     const std::vector<double>& power_spectrum) {
  if (power_spectrum.size() != fb.num_bins()) {
    throw std::invalid_argument("apply_filterbank: expected " +
                                std::to_string(fb.num_bins()) + " bins");
  }
  std::vector<double> out(fb.num_bands, 0.0);
  for (uint32_t b = 0; b < fb.num_bands; ++b) {
    const double* w = fb.weights.data() + static_cast<size_t>(b) * fb.num_bins();
    double acc = 0.0;
    for (uint32_t k = 0; k < fb.num_bins(); ++k) acc += w[k] * power_spectrum[k];
    out[b] = acc;
  }
  return out;
}

FeatureMatrix extract_logmel(const AudioSignal& audio, const LogmelOptions& opts,
                             const std::string& source_id) {
  return extract_impl(audio, opts, source_id, true);
}

FeatureMatrix extract_logmel_serial(const AudioSignal& audio, const LogmelOptions& opts,
                                    const std::string& source_id) {
  return extract_impl(audio, opts, source_id, false);
}

}  // namespace asrpipe
