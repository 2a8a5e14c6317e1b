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
#include <stdexcept>

#include "asrpipe/sched.hpp"

using namespace asrpipe;

TEST_CASE("newbob holds the rate while scores keep improving") {
  NewbobState st;
  st.current_lr = 0.0009;
  double score = 3.0;
  for (uint64_t epoch = 0; epoch < 10; ++epoch) {
    st = newbob_step(st, epoch, score);
    CHECK(st.current_lr == 0.0009);
    score -= 0.1;
  }
  CHECK(st.history.size() == 10);
}

TEST_CASE("three stagnant epochs decay the rate by 0.9 cubed") {
  NewbobState st;
  st.current_lr = 0.0009;
  st = newbob_step(st, 0, 2.0);  // first score, no decay
  CHECK(st.current_lr == 0.0009);
  for (uint64_t epoch = 1; epoch <= 3; ++epoch) {
    st = newbob_step(st, epoch, 2.0);
  }
  CHECK(std::fabs(st.current_lr - 0.0009 * 0.9 * 0.9 * 0.9) < 1e-12);
}

TEST_CASE("the rate never drops below min_lr") {
  NewbobState st;
  st.current_lr = 1e-8;
  st.min_lr = 1e-8;
  st = newbob_step(st, 0, 1.0);
  st = newbob_step(st, 1, 1.0);
  st = newbob_step(st, 2, 5.0);
  CHECK(st.current_lr == 1e-8);
}

TEST_CASE("newbob rate is non-increasing under never-improving scores") {
  std::mt19937_64 gen(1);
  NewbobState st;
  st.current_lr = 0.1;
  double best = 1.0;
  st = newbob_step(st, 0, best);
  double prev_lr = st.current_lr;
  for (uint64_t epoch = 1; epoch < 50; ++epoch) {
    const double score = best + std::uniform_real_distribution<double>(0.0, 0.5)(gen);
    st = newbob_step(st, epoch, score);
    CHECK(st.current_lr <= prev_lr);
    prev_lr = st.current_lr;
  }
  CHECK(std::fabs(st.current_lr - 0.1 * std::pow(0.9, 49)) / st.current_lr < 1e-9);
}

TEST_CASE("newbob_step is pure and rejects non-finite scores") {
  NewbobState st;
  st.current_lr = 0.5;
  const NewbobState next = newbob_step(st, 0, 1.0);
  CHECK(st.history.empty());
  CHECK(next.history.size() == 1);
  CHECK_THROWS_AS(newbob_step(st, 0, std::nan("")), std::invalid_argument);
}

TEST_CASE("layer-wise schedule grows one layer per stage up to the total") {
  PretrainSchedule s;  // 6 layers, 1 epoch per stage
  CHECK(active_layers(s, 0) == 1);
  CHECK(active_layers(s, 1) == 2);
  CHECK(active_layers(s, 4) == 5);
  CHECK(active_layers(s, 5) == 6);
  CHECK(active_layers(s, 100) == 6);

  PretrainSchedule slow{6, 2};
  CHECK(active_layers(slow, 3) == 2);

  uint32_t prev = 0;
  for (uint64_t e = 0; e < 30; ++e) {
    const uint32_t a = active_layers(slow, e);
    CHECK(a >= prev);
    prev = a;
  }
  CHECK(prev == 6);
}

TEST_CASE("focal loss vanishes at certainty and reduces to CE at gamma 0") {
  CHECK(focal_loss(1.0, 0.0) == 0.0);
  CHECK(focal_loss(1.0, 2.0) == 0.0);
  std::mt19937_64 gen(2);
  for (int i = 0; i < 100; ++i) {
    const double p = std::uniform_real_distribution<double>(1e-6, 1.0)(gen);
    CHECK(focal_loss(p, 0.0) == -std::log(p));
    // focal loss never exceeds cross-entropy
    for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
      CHECK(focal_loss(p, gamma) <= -std::log(p) + 1e-15);
    }
  }
}

TEST_CASE("focal gradient matches central finite differences") {
  const double h = 1e-6;
  for (double p : {0.1, 0.5, 0.9}) {
    const double grad = focal_loss_grad(p, 2.0);
    const double fd = (focal_loss(p + h, 2.0) - focal_loss(p - h, 2.0)) / (2.0 * h);
    CHECK(std::fabs(grad - fd) / std::fabs(fd) < 1e-6);
  }
  // gamma 0 gradient is the CE gradient
  for (double p : {0.2, 0.7, 1.0}) {
    CHECK(focal_loss_grad(p, 0.0) == -1.0 / p);
  }
  CHECK(focal_loss_grad(1.0, 2.0) == 0.0);
}

TEST_CASE("focal loss rejects out-of-range probabilities") {
  CHECK_THROWS_AS(focal_loss(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(focal_loss(-0.1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(focal_loss(1.1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(focal_loss(0.5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(focal_loss_grad(0.0, 2.0), std::invalid_argument);
}
