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

#ifndef ASRPIPE_SCHED_HPP_
#define ASRPIPE_SCHED_HPP_

#include <cstdint>
#include <utility>
#include <vector>

namespace asrpipe {

// Plateau-decay learning-rate schedule. Scores are "lower is better" (a dev
// cross-entropy, say). The rate is multiplied by `decay` whenever the
// relative improvement over the best score seen so far does not exceed
// `rel_improvement_threshold`, and never drops below min_lr.
struct NewbobState {
  double current_lr = 0.0009;
  double decay = 0.9;
  double rel_improvement_threshold = 0.0;
  double min_lr = 1e-8;
  std::vector<std::pair<uint64_t, double>> history;  // (epoch, dev_score)
};

// Pure step function: returns the new state, input untouched. The first
// scored epoch never decays.
NewbobState newbob_step(const NewbobState& state, uint64_t epoch, double dev_score);

// Layer-wise pretraining: one more layer every epochs_per_stage epochs until
// all layers are active.
struct PretrainSchedule {
  uint32_t total_layers = 6;
  uint32_t epochs_per_stage = 1;
};

uint32_t active_layers(const PretrainSchedule& sched, uint64_t epoch);

// Focal loss -(1-p)^gamma * ln(p) for the true-class probability p in (0, 1];
// gamma = 0 reduces to cross-entropy. p outside (0, 1] is an error (callers
// floor their probabilities).
double focal_loss(double p, double gamma = 2.0);
double focal_loss_grad(double p, double gamma = 2.0);

}  // namespace asrpipe

#endif  // ASRPIPE_SCHED_HPP_
