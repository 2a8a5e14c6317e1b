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

#ifndef ASRPIPE_RNG_HPP_
#define ASRPIPE_RNG_HPP_

#include <cstdint>
#include <stdexcept>

namespace asrpipe {

// Deterministic 64-bit generator used everywhere randomness is needed.
//
// The algorithm is splitmix64 so that draw sequences can be replicated
// bit-exactly from any language given the seed and the draw order:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Bounded draws are plain modulo reduction: next_below(n) = next() % n.
// The modulo bias for the small ranges used here (< 2^16) is far below
// anything observable.
//
// Sub-streams: fork(i) seeds a child generator with
// mix64(state + (i + 1) * 0x9E3779B97F4A7C15) where mix64 is the output
// scrambler above. The parent stream is not advanced, so forking is a pure
// function of (parent state, i); per-item sub-streams make parallel
// processing independent of scheduling order.
class SeededRng {
 public:
  static constexpr const char* kAlgorithmId = "splitmix64";
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit SeededRng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, n). n must be >= 1.
  uint64_t next_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("SeededRng::next_below: n must be >= 1");
    return next() % n;
  }

  // Uniform on [lo, hi], both ends inclusive.
  uint64_t next_range(uint64_t lo, uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("SeededRng::next_range: lo > hi");
    return lo + next_below(hi - lo + 1);
  }

  SeededRng fork(uint64_t stream) const {
    return SeededRng(mix64(state_ + (stream + 1) * kGolden));
  }

  uint64_t state() const { return state_; }

 private:
  static uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace asrpipe

#endif  // ASRPIPE_RNG_HPP_
