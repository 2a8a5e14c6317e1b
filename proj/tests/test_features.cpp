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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "asrpipe/audio.hpp"
#include "asrpipe/embedding.hpp"
#include "asrpipe/feature_matrix.hpp"
#include "asrpipe/logmel.hpp"
#include "test_support.hpp"

using namespace asrpipe;
using testsupport::TempDir;

namespace {

constexpr double kPi = 3.14159265358979323846;

double mel(double f) { return 1127.0 * std::log(1.0 + f / 700.0); }
double mel_inv(double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); }

AudioSignal sine_wave(double freq_hz, double amplitude, double seconds, uint32_t sr) {
  AudioSignal a;
  a.sample_rate_hz = sr;
  a.samples.resize(static_cast<size_t>(seconds * sr));
  for (size_t i = 0; i < a.samples.size(); ++i) {
    a.samples[i] = amplitude * std::sin(2.0 * kPi * freq_hz * i / sr);
  }
  return a;
}

AudioSignal noise(double amplitude, size_t samples, uint32_t sr, uint64_t seed) {
  AudioSignal a;
  a.sample_rate_hz = sr;
  a.samples.resize(samples);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (double& s : a.samples) s = dist(gen);
  return a;
}

// Oracle for the sine test: naive O(N^2) DFT of one Hann-windowed frame plus
// a locally rebuilt triangular filterbank, fully independent of the library's
// FFT and filterbank code.
std::vector<double> oracle_band_energies(const AudioSignal& audio, uint32_t window,
                                         uint32_t nfft, uint32_t num_bands) {
  std::vector<double> x(nfft, 0.0);
  for (uint32_t n = 0; n < window; ++n) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * n / (window - 1));
    x[n] = audio.samples[n] * hann;
  }
  const uint32_t bins = nfft / 2 + 1;
  std::vector<double> power(bins);
  for (uint32_t k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (uint32_t n = 0; n < nfft; ++n) {
      re += x[n] * std::cos(-2.0 * kPi * k * n / nfft);
      im += x[n] * std::sin(-2.0 * kPi * k * n / nfft);
    }
    power[k] = re * re + im * im;
  }
  const double mel_hi = mel(audio.sample_rate_hz / 2.0);
  std::vector<double> energies(num_bands, 0.0);
  for (uint32_t b = 0; b < num_bands; ++b) {
    const double lo = mel_hi * b / (num_bands + 1);
    const double mid = mel_hi * (b + 1) / (num_bands + 1);
    const double hi = mel_hi * (b + 2) / (num_bands + 1);
    for (uint32_t k = 0; k < bins; ++k) {
      const double m = mel(k * static_cast<double>(audio.sample_rate_hz) / nfft);
      double w = 0.0;
      if (m > lo && m < mid) w = (m - lo) / (mid - lo);
      else if (m >= mid && m < hi) w = (hi - m) / (hi - mid);
      energies[b] += w * power[k];
    }
  }
  return energies;
}

}  // namespace

TEST_CASE("all-zero signal floors every output value") {
  AudioSignal a;
  a.sample_rate_hz = 16000;
  a.samples.assign(16000, 0.0);
  LogmelOptions opts;
  const FeatureMatrix m = extract_logmel(a, opts);
  CHECK(m.num_dims == 80);
  const double floor_val = std::log(1e-10);
  for (double v : m.data) CHECK(v == doctest::Approx(floor_val).epsilon(1e-12));
}

TEST_CASE("frame count matches the window placement formula and brute force") {
  // 1 kHz sample rate makes ms equal samples
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const uint32_t window = 16 + gen() % 45;
    const uint32_t shift = 1 + gen() % window;
    const uint32_t len = window + gen() % 380;

    uint32_t brute = 0;
    for (uint32_t pos = 0; pos + window <= len; pos += shift) brute++;
    const uint32_t formula = (len - window) / shift + 1;
    CHECK(brute == formula);

    AudioSignal a = noise(0.1, len, 1000, trial);
    LogmelOptions opts;
    opts.window_ms = window;
    opts.shift_ms = shift;
    opts.num_bands = 3;
    const FeatureMatrix m = extract_logmel(a, opts);
    CHECK(m.num_frames == brute);
  }
}

TEST_CASE("a sine at a band center peaks in that band, against the DFT oracle") {
  LogmelOptions opts;
  const uint32_t sr = 16000;
  const uint32_t window = 400, nfft = 512;
  const double mel_hi = mel(sr / 2.0);
  for (uint32_t band : {20u, 40u, 60u}) {
    const double fc = mel_inv(mel_hi * (band + 1) / (opts.num_bands + 1));
    const AudioSignal a = sine_wave(fc, 0.5, 0.2, sr);

    const FeatureMatrix m = extract_logmel(a, opts);
    std::vector<double> mean(opts.num_bands, 0.0);
    for (uint32_t t = 0; t < m.num_frames; ++t) {
      for (uint32_t b = 0; b < opts.num_bands; ++b) mean[b] += m.at(t, b);
    }
    uint32_t argmax = 0;
    for (uint32_t b = 1; b < opts.num_bands; ++b) {
      if (mean[b] > mean[argmax]) argmax = b;
    }
    CHECK(argmax == band);

    const std::vector<double> oracle = oracle_band_energies(a, window, nfft, opts.num_bands);
    uint32_t oracle_argmax = 0;
    for (uint32_t b = 1; b < opts.num_bands; ++b) {
      if (oracle[b] > oracle[oracle_argmax]) oracle_argmax = b;
    }
    CHECK(oracle_argmax == band);
  }
}

TEST_CASE("scaling a signal shifts every logmel value by exactly 2 ln s") {
  LogmelOptions opts;
  for (double s : {0.5, 2.0, 10.0}) {
    AudioSignal a = noise(0.09, 8000, 16000, 77);
    AudioSignal scaled = a;
    for (double& v : scaled.samples) v *= s;

    const FeatureMatrix base = extract_logmel(a, opts);
    const FeatureMatrix shifted = extract_logmel(scaled, opts);
    const double expect = 2.0 * std::log(s);
    for (size_t i = 0; i < base.data.size(); ++i) {
      CHECK(base.data[i] > std::log(1e-10));  // nothing floored
      CHECK(std::fabs(shifted.data[i] - base.data[i] - expect) < 1e-6);
    }
  }
}

TEST_CASE("flat power spectrum gives strictly positive energy in every band") {
  const MelFilterbank fb = make_mel_filterbank(80, 512, 16000);
  const std::vector<double> ones(fb.num_bins(), 1.0);
  const std::vector<double> energies = apply_filterbank(fb, ones);
  for (double e : energies) CHECK(e > 0.0);
}

TEST_CASE("filterbank rejects more bands than the FFT can resolve") {
  CHECK_THROWS_AS(make_mel_filterbank(200, 64, 16000), std::invalid_argument);
}

TEST_CASE("extract_logmel error paths") {
  LogmelOptions opts;
  AudioSignal empty;
  empty.sample_rate_hz = 16000;
  CHECK_THROWS_WITH_AS(extract_logmel(empty, opts), doctest::Contains("empty signal"),
                       std::invalid_argument);

  AudioSignal shorty = noise(0.1, 100, 16000, 1);  // < 400-sample window
  CHECK_THROWS_WITH_AS(extract_logmel(shorty, opts), doctest::Contains("signal too short"),
                       std::invalid_argument);

  AudioSignal bad = noise(0.1, 1000, 16000, 2);
  bad.samples[500] = std::nan("");
  CHECK_THROWS_WITH_AS(extract_logmel(bad, opts), doctest::Contains("invalid audio"),
                       std::invalid_argument);
}

TEST_CASE("parallel and serial logmel agree bit-exactly") {
  const AudioSignal a = noise(0.2, 32000, 16000, 5);
  LogmelOptions opts;
  const FeatureMatrix p = extract_logmel(a, opts);
  const FeatureMatrix s = extract_logmel_serial(a, opts);
  CHECK(p.same_values(s));
}

TEST_CASE("stack_context identity at context 1") {
  const FeatureMatrix m = testsupport::random_features(7, 4, 3);
  const FeatureMatrix out = stack_context(m, 1);
  CHECK(out.same_values(m));
}

TEST_CASE("stack_context of 80 dims with context 9 gives 720 dims") {
  const FeatureMatrix m = testsupport::random_features(20, 80, 4);
  const FeatureMatrix out = stack_context(m, 9);
  CHECK(out.num_dims == 720);
  CHECK(out.num_frames == m.num_frames);
}

TEST_CASE("stack_context replicates edges, hand-checked on a 3x2 matrix") {
  FeatureMatrix m;
  m.num_frames = 3;
  m.num_dims = 2;
  m.data = {1, 2, 3, 4, 5, 6};
  const FeatureMatrix out = stack_context(m, 3);
  CHECK(out.num_dims == 6);
  const std::vector<double> f0 = {1, 2, 1, 2, 3, 4};
  const std::vector<double> f1 = {1, 2, 3, 4, 5, 6};
  const std::vector<double> f2 = {3, 4, 5, 6, 5, 6};
  for (uint32_t d = 0; d < 6; ++d) {
    CHECK(out.at(0, d) == f0[d]);
    CHECK(out.at(1, d) == f1[d]);
    CHECK(out.at(2, d) == f2[d]);
  }
}

TEST_CASE("slicing the center block of a stacked matrix recovers the input") {
  for (uint32_t context : {3u, 5u, 9u}) {
    const FeatureMatrix m = testsupport::random_features(13, 5, context);
    const FeatureMatrix out = stack_context(m, context);
    const uint32_t off = (context - 1) / 2 * m.num_dims;
    for (uint32_t t = 0; t < m.num_frames; ++t) {
      for (uint32_t d = 0; d < m.num_dims; ++d) {
        CHECK(out.at(t, off + d) == m.at(t, d));
      }
    }
  }
}

TEST_CASE("stack_context rejects empty and even-context inputs") {
  FeatureMatrix empty;
  CHECK_THROWS_AS(stack_context(empty, 3), std::invalid_argument);
  const FeatureMatrix m = testsupport::random_features(3, 2, 9);
  CHECK_THROWS_AS(stack_context(m, 2), std::invalid_argument);
  CHECK_THROWS_AS(stack_context(m, 0), std::invalid_argument);
}

TEST_CASE("concat_embedding appends constant trailing dims") {
  FeatureMatrix m = testsupport::random_features(6, 80, 8, "rec1");
  SpeakerEmbedding emb;
  emb.recording_id = "rec1";
  emb.values.resize(100);
  for (size_t i = 0; i < 100; ++i) emb.values[i] = 0.01 * static_cast<double>(i);

  const FeatureMatrix out = concat_embedding(m, emb);
  CHECK(out.num_dims == 180);
  for (uint32_t t = 0; t < out.num_frames; ++t) {
    for (uint32_t d = 0; d < 80; ++d) CHECK(out.at(t, d) == m.at(t, d));
    for (uint32_t d = 0; d < 100; ++d) {
      CHECK(out.at(t, 80 + d) == emb.values[d]);
      CHECK(out.at(t, 80 + d) == out.at(0, 80 + d));  // identical across frames
    }
  }

  SpeakerEmbedding zero;
  zero.recording_id = "rec1";
  zero.values.assign(100, 0.0);
  const FeatureMatrix z = concat_embedding(m, zero);
  for (uint32_t t = 0; t < z.num_frames; ++t) {
    for (uint32_t d = 80; d < 180; ++d) CHECK(z.at(t, d) == 0.0);
  }

  SpeakerEmbedding wrong;
  wrong.recording_id = "other";
  wrong.values.assign(100, 0.0);
  CHECK_THROWS_WITH_AS(concat_embedding(m, wrong), doctest::Contains("id mismatch"),
                       std::invalid_argument);
}

TEST_CASE("FMX1 round-trips bit-exactly") {
  TempDir tmp("fmx");
  const FeatureMatrix m = testsupport::random_features(33, 17, 9, "rt");
  const std::string p1 = tmp.path("a.fmx");
  write_fmx(m, p1);

  const FeatureMatrix back = read_fmx(p1);
  CHECK(back.same_values(m));
  CHECK(back.num_frames == m.num_frames);
  CHECK(back.num_dims == m.num_dims);
  CHECK(back.frame_shift_ms == m.frame_shift_ms);

  // file-level round trip: read then write reproduces the bytes
  const std::string p2 = tmp.path("b.fmx");
  write_fmx(back, p2);
  CHECK(testsupport::read_file_bytes(p1) == testsupport::read_file_bytes(p2));
}

TEST_CASE("FMX1 reader rejects malformed files") {
  TempDir tmp("fmxbad");
  {
    std::ofstream f(tmp.path("bad.fmx"), std::ios::binary);
    f << "NOPE" << std::string(12, '\0');
  }
  CHECK_THROWS_WITH_AS(read_fmx(tmp.path("bad.fmx")), doctest::Contains("not an FMX1"),
                       std::runtime_error);

  {
    // header claims 2x2 but carries a single value
    std::ofstream f(tmp.path("short.fmx"), std::ios::binary);
    const unsigned char hdr[16] = {'F', 'M', 'X', '1', 2, 0, 0, 0, 2, 0, 0, 0, 16, 39, 0, 0};
    f.write(reinterpret_cast<const char*>(hdr), 16);
    const float one = 1.0f;
    f.write(reinterpret_cast<const char*>(&one), 4);
  }
  CHECK_THROWS_WITH_AS(read_fmx(tmp.path("short.fmx")), doctest::Contains("size mismatch"),
                       std::runtime_error);

  {
    // NaN payload
    std::ofstream f(tmp.path("nan.fmx"), std::ios::binary);
    const unsigned char hdr[16] = {'F', 'M', 'X', '1', 1, 0, 0, 0, 1, 0, 0, 0, 16, 39, 0, 0};
    f.write(reinterpret_cast<const char*>(hdr), 16);
    const unsigned char nan_bytes[4] = {0x00, 0x00, 0xC0, 0x7F};
    f.write(reinterpret_cast<const char*>(nan_bytes), 4);
  }
  CHECK_THROWS_WITH_AS(read_fmx(tmp.path("nan.fmx")), doctest::Contains("non-finite"),
                       std::runtime_error);
}

TEST_CASE("WAV io round-trips within quantization and rejects bad formats") {
  TempDir tmp("wav");
  const AudioSignal a = noise(0.5, 4000, 16000, 21);
  write_wav(a, tmp.path("mono.wav"));
  const AudioSignal back = read_wav(tmp.path("mono.wav"));
  REQUIRE(back.samples.size() == a.samples.size());
  CHECK(back.sample_rate_hz == 16000);
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(std::fabs(back.samples[i] - a.samples[i]) < 1.0 / 32768.0 + 1e-9);
    CHECK(std::fabs(back.samples[i]) <= 1.0);
  }

  {
    std::ofstream f(tmp.path("noise.bin"), std::ios::binary);
    f << "this is not audio";
  }
  CHECK_THROWS_WITH_AS(read_wav(tmp.path("noise.bin")), doctest::Contains("RIFF"),
                       std::runtime_error);

  // hand-built stereo header
  {
    std::string w = testsupport::read_file_bytes(tmp.path("mono.wav"));
    w[22] = 2;  // channel count field
    std::ofstream f(tmp.path("stereo.wav"), std::ios::binary);
    f << w;
  }
  CHECK_THROWS_WITH_AS(read_wav(tmp.path("stereo.wav")), doctest::Contains("mono"),
                       std::runtime_error);

  // 8-bit sample width
  {
    std::string w = testsupport::read_file_bytes(tmp.path("mono.wav"));
    w[34] = 8;  // bits per sample field
    std::ofstream f(tmp.path("8bit.wav"), std::ios::binary);
    f << w;
  }
  CHECK_THROWS_WITH_AS(read_wav(tmp.path("8bit.wav")), doctest::Contains("16-bit"),
                       std::runtime_error);
}
