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

#include <algorithm>
#include <map>
#include <random>

#include "asrpipe/chunker.hpp"
#include "test_support.hpp"

using namespace asrpipe;

TEST_CASE("64 frames at chunk 64 / overlap 0.5 is a single full chunk") {
  const FeatureMatrix m = testsupport::random_features(64, 3, 1);
  const auto chunks = split_chunks(m, 64, 0.5);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].start_frame == 0);
  CHECK(chunks[0].valid_frames == 64);
}

TEST_CASE("128 frames at chunk 64 / overlap 0.5 starts at 0, 32, 64") {
  const FeatureMatrix m = testsupport::random_features(128, 3, 2);
  const auto chunks = split_chunks(m, 64, 0.5);
  REQUIRE(chunks.size() == 3);
  const uint32_t starts[3] = {0, 32, 64};
  for (int i = 0; i < 3; ++i) {
    CHECK(chunks[i].start_frame == starts[i]);
    CHECK(chunks[i].valid_frames == 64);
  }
}

TEST_CASE("70 frames pads the trailing chunk by repeating the last frame") {
  const FeatureMatrix m = testsupport::random_features(70, 4, 3);
  const auto chunks = split_chunks(m, 64, 0.5);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].start_frame == 0);
  CHECK(chunks[1].start_frame == 32);
  CHECK(chunks[1].valid_frames == 38);
  for (uint32_t t = 38; t < 64; ++t) {
    for (uint32_t d = 0; d < 4; ++d) {
      CHECK(chunks[1].at(t, d) == m.at(69, d));  // padding repeats frame 69
    }
  }
}

TEST_CASE("sequences shorter than the chunk produce one padded chunk") {
  const FeatureMatrix m = testsupport::random_features(5, 2, 4);
  const auto chunks = split_chunks(m, 64, 0.5);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].valid_frames == 5);
  for (uint32_t t = 5; t < 64; ++t) {
    CHECK(chunks[0].at(t, 0) == m.at(4, 0));
  }
}

TEST_CASE("split_chunks validates its arguments") {
  FeatureMatrix empty;
  CHECK_THROWS_AS(split_chunks(empty, 64, 0.5), std::invalid_argument);
  const FeatureMatrix m = testsupport::random_features(10, 2, 5);
  CHECK_THROWS_AS(split_chunks(m, 64, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(split_chunks(m, 64, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(split_chunks(m, 3, 0.5), std::invalid_argument);  // stride 1.5
}

TEST_CASE("coverage: chunk ranges tile the source with the exact overlap") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const uint32_t frames = 1 + gen() % 500;
    const FeatureMatrix m = testsupport::random_features(frames, 1 + gen() % 8, trial);
    const auto chunks = split_chunks(m, 64, 0.5);

    std::vector<char> covered(frames, 0);
    for (const Chunk& c : chunks) {
      for (uint32_t t = 0; t < c.valid_frames; ++t) covered[c.start_frame + t] = 1;
    }
    CHECK(std::count(covered.begin(), covered.end(), char(1)) == static_cast<long>(frames));
    for (size_t i = 1; i < chunks.size(); ++i) {
      CHECK(chunks[i].start_frame - chunks[i - 1].start_frame == 32);
    }
  }
}

TEST_CASE("reassemble inverts split_chunks bit-exactly") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const uint32_t frames = 1 + gen() % 300;
    const uint32_t dims = 1 + gen() % 12;
    const FeatureMatrix m = testsupport::random_features(frames, dims, 1000 + trial);
    const auto chunks = split_chunks(m, 64, 0.5);
    const FeatureMatrix back = reassemble(chunks, frames);
    CHECK(back.same_values(m));
  }
}

TEST_CASE("reassemble rejects gaps and dim mismatches") {
  const FeatureMatrix m = testsupport::random_features(128, 3, 8);
  auto chunks = split_chunks(m, 64, 0.0);  // two disjoint chunks
  REQUIRE(chunks.size() == 2);
  auto missing = chunks;
  missing.pop_back();
  CHECK_THROWS_WITH_AS(reassemble(missing, 128), doctest::Contains("gap"),
                       std::invalid_argument);

  auto bad = chunks;
  bad[1].num_dims = 2;
  CHECK_THROWS_WITH_AS(reassemble(bad, 128), doctest::Contains("dim mismatch"),
                       std::invalid_argument);

  CHECK_THROWS_AS(reassemble({}, 10), std::invalid_argument);
}

TEST_CASE("make_batches partitions chunks with only the last batch short") {
  const FeatureMatrix m = testsupport::random_features(64 * 10, 2, 9, "src");
  auto chunks = split_chunks(m, 64, 0.0);
  REQUIRE(chunks.size() == 10);

  const auto batches = make_batches(chunks, 4, std::nullopt);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 4);
  CHECK(batches[1].size() == 4);
  CHECK(batches[2].size() == 2);
  // order preserved without a seed
  uint32_t prev = 0;
  for (const auto& b : batches) {
    for (const auto& c : b.chunks) {
      CHECK(c.start_frame >= prev);
      prev = c.start_frame;
    }
  }
}

TEST_CASE("256 chunks at batch size 128 give two full batches") {
  const FeatureMatrix m = testsupport::random_features(64 * 256, 1, 12);
  const auto batches = make_batches(split_chunks(m, 64, 0.0), 128, std::nullopt);
  REQUIRE(batches.size() == 2);
  CHECK(batches[0].size() == 128);
  CHECK(batches[1].size() == 128);
}

TEST_CASE("one chunk yields one batch of size one") {
  const FeatureMatrix m = testsupport::random_features(64, 2, 10);
  const auto batches = make_batches(split_chunks(m, 64, 0.5), 128, std::nullopt);
  REQUIRE(batches.size() == 1);
  CHECK(batches[0].size() == 1);
}

TEST_CASE("shuffled batching is a seed-deterministic permutation") {
  const FeatureMatrix m = testsupport::random_features(64 * 9, 2, 11);
  const auto chunks = split_chunks(m, 64, 0.0);

  const auto b1 = make_batches(chunks, 4, 42);
  const auto b2 = make_batches(chunks, 4, 42);
  REQUIRE(b1.size() == b2.size());
  for (size_t i = 0; i < b1.size(); ++i) {
    REQUIRE(b1[i].size() == b2[i].size());
    for (size_t j = 0; j < b1[i].chunks.size(); ++j) {
      CHECK(b1[i].chunks[j].start_frame == b2[i].chunks[j].start_frame);
    }
  }

  // multiset of chunks preserved under shuffling
  std::map<uint32_t, int> in_counts, out_counts;
  for (const auto& c : chunks) in_counts[c.start_frame]++;
  for (const auto& b : b1) {
    for (const auto& c : b.chunks) out_counts[c.start_frame]++;
  }
  CHECK(in_counts == out_counts);

  const auto b3 = make_batches(chunks, 4, 43);
  bool any_diff = false;
  for (size_t i = 0; i < b1.size() && !any_diff; ++i) {
    for (size_t j = 0; j < b1[i].chunks.size(); ++j) {
      if (b1[i].chunks[j].start_frame != b3[i].chunks[j].start_frame) {
        any_diff = true;
        break;
      }
    }
  }
  CHECK(any_diff);
}
