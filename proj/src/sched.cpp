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

#include "asrpipe/sched.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asrpipe {

NewbobState newbob_step(const NewbobState& state, uint64_t epoch, double dev_score) {
  if (!std::isfinite(dev_score)) {
    throw std::invalid_argument("newbob_step: dev_score must be finite");
  }
  NewbobState next = state;
  if (!state.history.empty()) {
    double best = state.history.front().second;
    for (const auto& [e, s] : state.history) best = std::min(best, s);
    const double rel_improvement =
        (best - dev_score) / std::max(std::fabs(best), 1e-300);
    // An epoch that fails to beat the threshold (a merely-equal score
    // included) triggers the decay.
    if (rel_improvement <= state.rel_improvement_threshold) {
      next.current_lr = std::max(state.min_lr, state.current_lr * state.decay);
    }
  }
  next.history.emplace_back(epoch, dev_score);
  return next;
}

uint32_t active_layers(const PretrainSchedule& sched, uint64_t epoch) {
  if (sched.total_layers < 1 || sched.epochs_per_stage < 1) {
    throw std::invalid_argument("active_layers: bad schedule");
  }
  const uint64_t stage = 1 + epoch / sched.epochs_per_stage;
  return static_cast<uint32_t>(std::min<uint64_t>(sched.total_layers, stage));
}

double focal_loss(double p, double gamma) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("focal_loss: p must be in (0, 1]");
  }
  if (gamma < 0.0) throw std::invalid_argument("focal_loss: gamma must be >= 0");
  return -std::pow(1.0 - p, gamma) * std::log(p);
}

double focal_loss_grad(double p, double gamma) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("focal_loss_grad: p must be in (0, 1]");
  }
  if (gamma < 0.0) throw std::invalid_argument("focal_loss_grad: gamma must be >= 0");
  if (gamma == 0.0) return -1.0 / p;
  if (p == 1.0) return 0.0;  // limit of both terms
  return gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p) -
         std::pow(1.0 - p, gamma) / p;
}

}  // namespace asrpipe
