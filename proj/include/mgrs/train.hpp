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

#include <optional>
#include <string>
#include <vector>

#include "mgrs/adam.hpp"
#include "mgrs/checkpoint.hpp"
#include "mgrs/config.hpp"
#include "mgrs/data.hpp"
#include "mgrs/distill.hpp"

namespace mgrs {

// Two-stage training. Stage 1 fits the mask predictor with BCE; stage 2
// trains the restoration network plus the distillation meta-parameters with
// L1 + lambda * R against the frozen stage-1 network. Both stages are
// bit-deterministic given (config, seed): batches derive their RNG
// statelessly from (seed, epoch, batch_index), so interrupting and resuming
// from a checkpoint reproduces the uninterrupted run exactly.

struct TrainLogRow {
  int64_t epoch = 0;
  double loss_main = 0.0;     // epoch mean; BCE in stage 1, L1 in stage 2
  double loss_distill = 0.0;  // epoch mean of R (0 in stage 1)
  double lr = 0.0;
  double psnr = 0.0;  // held-out restored PSNR (0 in stage 1)
  double ssim = 0.0;
  double iou = 0.0;  // held-out mask IoU
  double wall_seconds = 0.0;  // stdout only, never in the CSV
};

struct TrainLog {
  std::vector<TrainLogRow> rows;

  /// Columns: epoch,loss_l1,loss_R,lr,psnr,ssim,iou. Byte-deterministic
  /// across runs (wall time excluded).
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// lr0 halved every lr_half_every epochs.
double lr_schedule(int64_t epoch, const Config& cfg);

struct Batch {
  Tensor degraded;  // (B,3,P,P)
  Tensor clean;     // (B,3,P,P)
  Tensor mask;      // (B,1,P,P)
};

/// Random crops + random horizontal/vertical flips, applied identically to
/// all three planes of each sampled triple.
Batch sample_batch(const Dataset& data, const Config& cfg, Rng& rng);
/// Stateless per-(seed, epoch, batch_index) derivation of the batch RNG.
Batch sample_batch_at(const Dataset& data, const Config& cfg, int64_t epoch,
                      int64_t batch_index);

struct StageOutput {
  Checkpoint checkpoint;
  TrainLog log;
};

/// Stage 1. Writes <out_dir>/mask.ckpt and <out_dir>/mask_train_log.csv
/// every epoch when out_dir is non-empty. `resume` continues after the
/// checkpoint's epoch; its config hash must match.
StageOutput train_mask_stage(const Config& cfg, const Dataset& train_set,
                             const Dataset& test_set, const std::string& out_dir,
                             const Checkpoint* resume = nullptr);

/// Stage 2. The stage-1 network is frozen (never mutated). Also writes
/// <out_dir>/distill_weights.csv with per-epoch mean alpha and mean rho
/// entropy per pair. Checkpoint parameters carry "net." and "distill."
/// prefixes.
StageOutput train_restore_stage(const Config& cfg, const Dataset& train_set,
                                const Dataset& test_set, const Checkpoint& mask_ckpt,
                                const std::string& out_dir,
                                const Checkpoint* resume = nullptr);

}  // namespace mgrs
