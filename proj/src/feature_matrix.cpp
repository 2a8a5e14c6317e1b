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

#include "asrpipe/feature_matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "asrpipe/embedding.hpp"

namespace asrpipe {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'X', '1'};

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& s, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(s, bits);
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

float get_f32(const uint8_t* p) {
  const uint32_t bits = get_u32(p);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

bool FeatureMatrix::same_values(const FeatureMatrix& other) const {
  return num_frames == other.num_frames && num_dims == other.num_dims &&
         data == other.data;
}

void write_fmx(const FeatureMatrix& m, const std::string& path) {
  if (static_cast<size_t>(m.num_frames) * m.num_dims != m.data.size()) {
    throw std::invalid_argument("write_fmx: shape does not match data size");
  }
  std::string out;
  out.reserve(16 + m.data.size() * 4);
  out.append(kMagic, 4);
  put_u32(out, m.num_frames);
  put_u32(out, m.num_dims);
  put_u32(out, static_cast<uint32_t>(std::lround(m.frame_shift_ms * 1000.0)));
  for (double d : m.data) put_f32(out, static_cast<float>(d));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

FeatureMatrix read_fmx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("not an FMX1 file: " + path);
  }
  FeatureMatrix m;
  m.num_frames = get_u32(bytes.data() + 4);
  m.num_dims = get_u32(bytes.data() + 8);
  m.frame_shift_ms = static_cast<double>(get_u32(bytes.data() + 12)) / 1000.0;
  const size_t count = static_cast<size_t>(m.num_frames) * m.num_dims;
  if (bytes.size() != 16 + count * 4) {
    throw std::runtime_error("FMX1 payload size mismatch: " + path);
  }
  m.data.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const float f = get_f32(bytes.data() + 16 + i * 4);
    if (!std::isfinite(f)) {
      throw std::runtime_error("non-finite value in feature file: " + path);
    }
    m.data[i] = static_cast<double>(f);
  }
  return m;
}

FeatureMatrix stack_context(const FeatureMatrix& feats, uint32_t context) {
  if (feats.num_frames == 0) {
    throw std::invalid_argument("stack_context: empty feature matrix");
  }
  if (context < 1 || context % 2 == 0) {
    throw std::invalid_argument("stack_context: context must be odd and >= 1");
  }
  const uint32_t half = (context - 1) / 2;

  FeatureMatrix out;
  out.num_frames = feats.num_frames;
  out.num_dims = feats.num_dims * context;
  out.frame_shift_ms = feats.frame_shift_ms;
  out.source_id = feats.source_id;
  out.data.resize(static_cast<size_t>(out.num_frames) * out.num_dims);

  for (uint32_t i = 0; i < feats.num_frames; ++i) {
    double* dst = out.data.data() + static_cast<size_t>(i) * out.num_dims;
    for (uint32_t c = 0; c < context; ++c) {
      // offset runs -half .. +half; edges replicate the boundary frame
      int64_t src = static_cast<int64_t>(i) + static_cast<int64_t>(c) - half;
      src = std::max<int64_t>(0, std::min<int64_t>(src, feats.num_frames - 1));
      const auto f = feats.frame(static_cast<uint32_t>(src));
      std::memcpy(dst + static_cast<size_t>(c) * feats.num_dims, f.data(),
                  feats.num_dims * sizeof(double));
    }
  }
  return out;
}

FeatureMatrix concat_embedding(const FeatureMatrix& feats, const SpeakerEmbedding& emb) {
  if (feats.source_id != emb.recording_id) {
    throw std::invalid_argument("concat_embedding: recording id mismatch ('" +
                                feats.source_id + "' vs '" + emb.recording_id + "')");
  }
  if (feats.num_frames == 0) {
    throw std::invalid_argument("concat_embedding: empty feature matrix");
  }
  const uint32_t edim = static_cast<uint32_t>(emb.values.size());

  FeatureMatrix out;
  out.num_frames = feats.num_frames;
  out.num_dims = feats.num_dims + edim;
  out.frame_shift_ms = feats.frame_shift_ms;
  out.source_id = feats.source_id;
  out.data.resize(static_cast<size_t>(out.num_frames) * out.num_dims);

  for (uint32_t i = 0; i < feats.num_frames; ++i) {
    double* dst = out.data.data() + static_cast<size_t>(i) * out.num_dims;
    std::memcpy(dst, feats.frame(i).data(), feats.num_dims * sizeof(double));
    std::memcpy(dst + feats.num_dims, emb.values.data(), edim * sizeof(double));
  }
  return out;
}

FeatureMatrix concat_frames(const std::vector<const FeatureMatrix*>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_frames: no inputs");
  FeatureMatrix out;
  out.num_dims = parts[0]->num_dims;
  out.frame_shift_ms = parts[0]->frame_shift_ms;
  for (const FeatureMatrix* p : parts) {
    if (p->num_dims != out.num_dims) {
      throw std::invalid_argument("concat_frames: dim mismatch");
    }
    out.data.insert(out.data.end(), p->data.begin(), p->data.end());
    out.num_frames += p->num_frames;
  }
  return out;
}

}  // namespace asrpipe
