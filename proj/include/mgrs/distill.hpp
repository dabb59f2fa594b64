// Copyright 2026 The mgrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "mgrs/networks.hpp"
#include "mgrs/tensor.hpp"

namespace mgrs {

// Attentive feature distillation between the frozen mask encoder (teacher)
// and the restoration encoder (student). For every (p,q) of the m*m
// breakpoint pairs:
//   - a 1x1 regressor maps student channels C_p to teacher channels C_q
//     (the teacher stays untouched; it is the fixed target),
//   - a rho head (GAP -> C_q -> C_q/2 -> C_q -> channel softmax) weights the
//     per-channel squared errors,
//   - an alpha head (GAP -> C_q -> C_q/2 -> 1) produces the pair logit;
//     alpha is the softmax over the m*m logits.
// Teacher features are detached on entry: no gradient ever reaches the mask
// network through the distillation loss.
struct DistillParams {
  int64_t m = 0;
  ParamSet params;
};

/// Regressors He-initialized; both meta-head output layers start at zero so
/// rho and alpha begin uniform.
DistillParams init_distill(const NetConfig& cfg, Rng& rng);
int64_t distill_param_count(const NetConfig& cfg);

struct MatchedPair {
  Tensor student;  // (N, C_q, H_p, W_p), on the tape
  Tensor teacher;  // same shape, constant
};

/// Teacher resized bilinearly to the student's spatial size; student mapped
/// through the pair's 1x1 regressor to the teacher's channel count.
MatchedPair match_dims(DistillParams& dp, int64_t p, int64_t q, const FeatureTap& student,
                       const FeatureTap& teacher);

/// Batch-averaged channel simplex for pair (p,q), shape (1, C_q, 1, 1).
Tensor rho_weights(DistillParams& dp, int64_t p, int64_t q, const Tensor& teacher_tap);

/// sum_c rho_c * ||(student - teacher)_c||^2 / (N * H * W).
Tensor pair_loss(const Tensor& student, const Tensor& teacher, const Tensor& rho);

/// Weights snapshot for logging. rho[i] has C_q entries for pair i = (p-1)*m
/// + (q-1); alpha has m*m entries summing to 1.
struct DistillWeights {
  std::vector<double> alpha;
  std::vector<std::vector<double>> rho;

  double rho_entropy(size_t pair) const;  // nats
};

struct DistillLossResult {
  Tensor loss;
  DistillWeights weights;
};

DistillLossResult total_distill_loss(DistillParams& dp,
                                     const std::vector<FeatureTap>& student_taps,
                                     const std::vector<FeatureTap>& teacher_taps);

/// Sets a pair's 1x1 regressor to the identity map (requires C_p == C_q).
void set_identity_regressor(DistillParams& dp, int64_t p, int64_t q);

}  // namespace mgrs
