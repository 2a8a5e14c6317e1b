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

#ifndef ASRPIPE_TESTS_TEST_SUPPORT_HPP_
#define ASRPIPE_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "asrpipe/feature_matrix.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    dir_ = std::filesystem::temp_directory_path() /
           ("asrpipe_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
  static inline int counter_ = 0;
};

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline asrpipe::FeatureMatrix random_features(uint32_t frames, uint32_t dims,
                                              uint64_t seed, const std::string& id = "t") {
  asrpipe::FeatureMatrix m;
  m.num_frames = frames;
  m.num_dims = dims;
  m.frame_shift_ms = 10.0;
  m.source_id = id;
  m.data.resize(static_cast<size_t>(frames) * dims);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  for (double& v : m.data) {
    // keep values exactly f32-representable so FMX round-trips stay bitwise
    v = static_cast<double>(static_cast<float>(dist(gen)));
  }
  return m;
}

}  // namespace testsupport

#endif  // ASRPIPE_TESTS_TEST_SUPPORT_HPP_
