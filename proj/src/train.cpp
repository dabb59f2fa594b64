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

#include "mgrs/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mgrs/evaluate.hpp"
#include "mgrs/metrics.hpp"

namespace mgrs {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int64_t steps_per_epoch(const Dataset& data, const Config& cfg) {
  return (static_cast<int64_t>(data.size()) + cfg.batch - 1) / cfg.batch;
}

void copy_window(const ImageTriple& src, int64_t oy, int64_t ox, int64_t patch, bool flip_h,
                 bool flip_v, int64_t b, Batch& out) {
  for (int64_t y = 0; y < patch; ++y) {
    const int64_t sy = oy + (flip_v ? patch - 1 - y : y);
    for (int64_t x = 0; x < patch; ++x) {
      const int64_t sx = ox + (flip_h ? patch - 1 - x : x);
      for (int64_t c = 0; c < 3; ++c) {
        out.degraded.at(b, c, y, x) = src.degraded.at(c, sy, sx);
        out.clean.at(b, c, y, x) = src.clean.at(c, sy, sx);
      }
      out.mask.at(b, 0, y, x) = src.mask.at(sy, sx);
    }
  }
}

// Deep copies so later optimizer steps cannot alias the snapshot.
ParamSet clone_params(const ParamSet& src) {
  ParamSet out;
  for (size_t i = 0; i < src.size(); ++i) out.add(src.name(i), src.tensor(i).clone());
  return out;
}

Checkpoint make_checkpoint(const Config& cfg, uint32_t epoch, const ParamSet& params,
                           const AdamState& adam) {
  Checkpoint ckpt;
  ckpt.config_hash = cfg.hash();
  ckpt.epoch = epoch;
  ckpt.params = clone_params(params);
  ckpt.has_adam = true;
  ckpt.adam_t = adam.t();
  ckpt.adam_beta1 = adam.beta1();
  ckpt.adam_beta2 = adam.beta2();
  ckpt.adam_eps = adam.eps();
  for (size_t i = 0; i < adam.count(); ++i) {
    ckpt.adam_m.push_back(adam.m(i).clone());
    ckpt.adam_v.push_back(adam.v(i).clone());
  }
  return ckpt;
}

AdamState adam_from_checkpoint(const Checkpoint& ckpt) {
  AdamState adam(ckpt.adam_beta1, ckpt.adam_beta2, ckpt.adam_eps);
  if (!ckpt.has_adam) throw ContractError("resume checkpoint has no optimizer state");
  adam.restore(ckpt.adam_t, ckpt.adam_m, ckpt.adam_v);
  return adam;
}

void check_resume(const Config& cfg, const Checkpoint& ckpt) {
  if (ckpt.config_hash != cfg.hash())
    throw ContractError("resume checkpoint was trained under a different config");
}

}  // namespace

std::string TrainLog::to_csv() const {
  std::string s = "epoch,loss_l1,loss_R,lr,psnr,ssim,iou\n";
  for (const TrainLogRow& r : rows) {
    s += std::to_string(r.epoch) + "," + fmt17(r.loss_main) + "," + fmt17(r.loss_distill) + "," +
         fmt17(r.lr) + "," + fmt17(r.psnr) + "," + fmt17(r.ssim) + "," + fmt17(r.iou) + "\n";
  }
  return s;
}

void TrainLog::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write train log " + path);
  out << to_csv();
}

double lr_schedule(int64_t epoch, const Config& cfg) {
  if (epoch < 0) throw ContractError("lr_schedule: negative epoch");
  return cfg.lr0 * std::pow(0.5, static_cast<double>(epoch / cfg.lr_half_every));
}

Batch sample_batch(const Dataset& data, const Config& cfg, Rng& rng) {
  if (data.size() == 0) throw ContractError("sample_batch: empty dataset");
  const int64_t P = cfg.patch;
  Batch out;
  out.degraded = Tensor({cfg.batch, 3, P, P});
  out.clean = Tensor({cfg.batch, 3, P, P});
  out.mask = Tensor({cfg.batch, 1, P, P});
  for (int64_t b = 0; b < cfg.batch; ++b) {
    const auto& item = data.items[static_cast<size_t>(rng.next_index(
        static_cast<int64_t>(data.size())))];
    if (item.degraded.h < P || item.degraded.w < P)
      throw ContractError("sample_batch: image smaller than patch");
    const int64_t oy = rng.next_index(item.degraded.h - P + 1);
    const int64_t ox = rng.next_index(item.degraded.w - P + 1);
    const bool flip_h = (rng.next_u64() & 1) != 0;
    const bool flip_v = (rng.next_u64() & 1) != 0;
    copy_window(item, oy, ox, P, flip_h, flip_v, b, out);
  }
  return out;
}

Batch sample_batch_at(const Dataset& data, const Config& cfg, int64_t epoch,
                      int64_t batch_index) {
  Rng rng = Rng(cfg.seed)
                .fork("batches")
                .at_index(static_cast<uint64_t>(epoch) * 0x10000ULL +
                          static_cast<uint64_t>(batch_index));
  return sample_batch(data, cfg, rng);
}

// ---------------------------------------------------------------------------
// Stage 1: mask predictor, BCE
// ---------------------------------------------------------------------------

StageOutput train_mask_stage(const Config& cfg, const Dataset& train_set,
                             const Dataset& test_set, const std::string& out_dir,
                             const Checkpoint* resume) {
  cfg.validate();
  const NetConfig net = cfg.net();

  ParamSet params;
  AdamState adam;
  int64_t start_epoch = 0;
  if (resume) {
    check_resume(cfg, *resume);
    params = clone_params(resume->params);
    adam = adam_from_checkpoint(*resume);
    start_epoch = resume->epoch + 1;
  } else {
    Rng init_rng = Rng(cfg.seed).fork("mask_init");
    params = init_mask_network(net, init_rng);
    adam = AdamState();
    adam.init(params);
  }
  params.set_requires_grad(true);

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  // On resume the log holds only the new epochs; earlier rows live in the
  // original run's CSV.
  StageOutput out;
  const int64_t steps = steps_per_epoch(train_set, cfg);
  for (int64_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const double t0 = now_seconds();
    const double lr = lr_schedule(epoch, cfg);
    double loss_sum = 0.0;
    for (int64_t b = 0; b < steps; ++b) {
      Batch batch = sample_batch_at(train_set, cfg, epoch, b);
      Tape tape;
      TapeScope scope(tape);
      MaskForwardResult fwd = mask_forward(net, params, batch.degraded);
      Tensor loss = ops::bce_loss(fwd.prob_mask, batch.mask);
      const double lv = loss.item();
      if (!std::isfinite(lv))
        throw ContractError("train_mask_stage: non-finite loss at epoch " +
                            std::to_string(epoch) + " batch " + std::to_string(b) + " loss " +
                            std::to_string(lv));
      loss_sum += lv;
      params.zero_grads();
      tape.backward(loss);
      adam.step(params, lr);
    }

    // Held-out mask IoU.
    double iou_sum = 0.0;
    for (size_t i = 0; i < test_set.size(); ++i) {
      const ImageTriple& t = test_set.items[i];
      MaskForwardResult fwd = mask_forward(net, params, image_to_tensor(t.degraded));
      iou_sum += mask_iou(tensor_to_mask(fwd.prob_mask), t.mask);
    }

    TrainLogRow row;
    row.epoch = epoch;
    row.loss_main = loss_sum / static_cast<double>(steps);
    row.loss_distill = 0.0;
    row.lr = lr;
    row.iou = test_set.size() ? iou_sum / static_cast<double>(test_set.size()) : 0.0;
    row.wall_seconds = now_seconds() - t0;
    out.log.rows.push_back(row);

    out.checkpoint = make_checkpoint(cfg, static_cast<uint32_t>(epoch), params, adam);
    if (!out_dir.empty()) {
      save_checkpoint(out_dir + "/mask.ckpt", out.checkpoint);
      out.log.write_csv(out_dir + "/mask_train_log.csv");
    }
    std::printf("[mask ] epoch %3lld  bce %.6f  lr %.3g  test IoU %.4f  (%.1fs)\n",
                static_cast<long long>(epoch), row.loss_main, lr, row.iou, row.wall_seconds);
    std::fflush(stdout);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage 2: restoration + distillation against the frozen stage-1 network
// ---------------------------------------------------------------------------

StageOutput train_restore_stage(const Config& cfg, const Dataset& train_set,
                                const Dataset& test_set, const Checkpoint& mask_ckpt,
                                const std::string& out_dir, const Checkpoint* resume) {
  cfg.validate();
  const NetConfig net = cfg.net();

  // Frozen teacher. Private deep copy: concurrent stage-2 runs may share one
  // stage-1 checkpoint.
  ParamSet mask_params = clone_params(mask_ckpt.params);

  ParamSet combined;
  ParamSet net_params;
  DistillParams dp;
  AdamState adam;
  int64_t start_epoch = 0;
  if (resume) {
    check_resume(cfg, *resume);
    combined = clone_params(resume->params);
    net_params = combined.subset("net.");
    dp.m = cfg.levels;
    dp.params = combined.subset("distill.");
    adam = adam_from_checkpoint(*resume);
    start_epoch = resume->epoch + 1;
  } else {
    Rng init_rng = Rng(cfg.seed).fork("restore_init");
    net_params = init_restore_network(net, init_rng);
    Rng distill_rng = Rng(cfg.seed).fork("distill_init");
    dp = init_distill(net, distill_rng);
    combined.absorb("net.", net_params);
    combined.absorb("distill.", dp.params);
    adam = AdamState();
    adam.init(combined);
  }
  combined.set_requires_grad(true);

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  const int64_t m2 = cfg.levels * cfg.levels;
  std::string distill_csv = "epoch";
  for (int64_t p = 1; p <= cfg.levels; ++p)
    for (int64_t q = 1; q <= cfg.levels; ++q)
      distill_csv += ",alpha_p" + std::to_string(p) + "q" + std::to_string(q);
  for (int64_t p = 1; p <= cfg.levels; ++p)
    for (int64_t q = 1; q <= cfg.levels; ++q)
      distill_csv += ",rho_entropy_p" + std::to_string(p) + "q" + std::to_string(q);
  distill_csv += "\n";

  StageOutput out;
  const int64_t steps = steps_per_epoch(train_set, cfg);
  for (int64_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const double t0 = now_seconds();
    const double lr = lr_schedule(epoch, cfg);
    double l1_sum = 0.0, r_sum = 0.0;
    std::vector<double> alpha_sum(static_cast<size_t>(m2), 0.0);
    std::vector<double> rho_ent_sum(static_cast<size_t>(m2), 0.0);

    for (int64_t b = 0; b < steps; ++b) {
      Batch batch = sample_batch_at(train_set, cfg, epoch, b);

      // Teacher pass outside any tape: constants by construction.
      MaskForwardResult teacher = mask_forward(net, mask_params, batch.degraded);

      Tape tape;
      TapeScope scope(tape);
      RestoreForwardResult student =
          restore_forward(net, net_params, batch.degraded, teacher.prob_mask);
      Tensor l1 = ops::l1_loss(student.restored, batch.clean);
      DistillLossResult distill = total_distill_loss(dp, student.taps, teacher.taps);
      Tensor total = ops::add(l1, ops::scale(distill.loss, cfg.lambda_distill));

      const double lv = total.item();
      if (!std::isfinite(lv))
        throw ContractError("train_restore_stage: non-finite loss at epoch " +
                            std::to_string(epoch) + " batch " + std::to_string(b) + " loss " +
                            std::to_string(lv));
      l1_sum += l1.item();
      r_sum += distill.loss.item();
      for (size_t i = 0; i < distill.weights.alpha.size(); ++i) {
        alpha_sum[i] += distill.weights.alpha[i];
        rho_ent_sum[i] += distill.weights.rho_entropy(i);
      }

      combined.zero_grads();
      tape.backward(total);
      adam.step(combined, lr);
    }

    MetricReport eval = evaluate_dataset(net, mask_params, net_params, test_set);

    TrainLogRow row;
    row.epoch = epoch;
    row.loss_main = l1_sum / static_cast<double>(steps);
    row.loss_distill = r_sum / static_cast<double>(steps);
    row.lr = lr;
    row.psnr = eval.mean_psnr_out;
    row.ssim = eval.mean_ssim_out;
    row.iou = eval.mean_iou;
    row.wall_seconds = now_seconds() - t0;
    out.log.rows.push_back(row);

    distill_csv += std::to_string(epoch);
    for (int64_t i = 0; i < m2; ++i)
      distill_csv += "," + fmt17(alpha_sum[static_cast<size_t>(i)] / static_cast<double>(steps));
    for (int64_t i = 0; i < m2; ++i)
      distill_csv +=
          "," + fmt17(rho_ent_sum[static_cast<size_t>(i)] / static_cast<double>(steps));
    distill_csv += "\n";

    out.checkpoint = make_checkpoint(cfg, static_cast<uint32_t>(epoch), combined, adam);
    if (!out_dir.empty()) {
      save_checkpoint(out_dir + "/restore.ckpt", out.checkpoint);
      out.log.write_csv(out_dir + "/restore_train_log.csv");
      std::ofstream dw(out_dir + "/distill_weights.csv", std::ios::trunc);
      if (!dw) throw IoError("cannot write distill weights csv");
      dw << distill_csv;
    }
    std::printf(
        "[restore] epoch %3lld  l1 %.6f  R %.6f  lr %.3g  test PSNR %.3f  SSIM %.4f  (%.1fs)\n",
        static_cast<long long>(epoch), row.loss_main, row.loss_distill, lr, row.psnr, row.ssim,
        row.wall_seconds);
    std::fflush(stdout);
  }
  return out;
}

}  // namespace mgrs
