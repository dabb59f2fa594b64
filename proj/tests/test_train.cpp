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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mgrs/evaluate.hpp"
#include "mgrs/image_io.hpp"
#include "mgrs/train.hpp"
#include "oracles.hpp"

using namespace mgrs;

namespace {

// Tiny pinned setup: 16x16 images, 2 levels, narrow nets. Fast enough for
// unit tests while exercising the full two-stage path.
Config tiny_config() {
  Config cfg;
  cfg.levels = 2;
  cfg.mask_base_channels = 4;
  cfg.restore_base_channels = 6;
  cfg.patch = 16;
  cfg.batch = 2;
  cfg.epochs = 2;
  cfg.seed = 7;
  cfg.lr0 = 1e-3;  // tiny runs need visible progress in a handful of steps
  return cfg;
}

Dataset tiny_dataset(uint64_t seed, int64_t count, int64_t size = 16) {
  Dataset ds;
  const Rng stream = Rng(seed).fork("tiny-data");
  for (int64_t i = 0; i < count; ++i) {
    Rng r = stream.at_index(static_cast<uint64_t>(i));
    Image clean = gen_clean_image(r, size, size);
    RainParams rp;
    rp.seed = r.next_u64();
    rp.streak_count = 6;
    rp.length_min = 5;
    rp.length_max = 10;
    DegradedPair pair = synth_rain(clean, rp);
    ds.ids.push_back("t" + std::to_string(i));
    ds.items.push_back({std::move(pair.degraded), std::move(clean), std::move(pair.mask)});
  }
  return ds;
}

}  // namespace

TEST_CASE("loss oracles") {
  Rng rng(3);
  Tensor p = oracle::random_tensor({2, 1, 4, 4}, rng, 0.01, 0.99);
  Tensor t(p.shape());
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = (rng.next_u64() & 1) ? 1.0 : 0.0;

  CHECK(std::abs(ops::bce_loss(p, t).item() - oracle::bce(p, t)) < 1e-12);

  // p = 1 - 1e-7 with target 1 is ~0
  Tensor sure = Tensor::constant({1, 1, 2, 2}, 1.0 - 1e-7);
  Tensor ones = Tensor::constant({1, 1, 2, 2}, 1.0);
  CHECK(ops::bce_loss(sure, ones).item() < 1e-6);

  // p = 0.5 everywhere is ln 2
  Tensor half = Tensor::constant({1, 1, 2, 2}, 0.5);
  CHECK(ops::bce_loss(half, ones).item() == doctest::Approx(0.693147).epsilon(1e-6));

  Tensor a = oracle::random_tensor({1, 3, 4, 4}, rng);
  Tensor b = oracle::random_tensor({1, 3, 4, 4}, rng);
  CHECK(ops::l1_loss(a, a).item() == 0.0);
  CHECK(std::abs(ops::l1_loss(a, b).item() - oracle::l1(a, b)) < 1e-12);

  Tensor off = Tensor::constant({1, 1, 3, 3}, 0.8);
  Tensor base = Tensor::constant({1, 1, 3, 3}, 0.5);
  CHECK(ops::l1_loss(off, base).item() == doctest::Approx(0.3).epsilon(1e-15));

  CHECK_THROWS_AS(ops::l1_loss(a, oracle::random_tensor({1, 3, 4, 5}, rng)), ContractError);
  CHECK_THROWS_AS(ops::bce_loss(p, oracle::random_tensor({2, 1, 4, 5}, rng)), ContractError);
}

TEST_CASE("lr_schedule") {
  Config cfg;  // lr0 1e-4, halved every 50
  CHECK(lr_schedule(0, cfg) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(lr_schedule(49, cfg) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(lr_schedule(50, cfg) == doctest::Approx(5e-5).epsilon(1e-15));
  CHECK(lr_schedule(100, cfg) == doctest::Approx(2.5e-5).epsilon(1e-15));
  double prev = 1e300;
  for (int64_t e = 0; e < 200; ++e) {
    CHECK(lr_schedule(e, cfg) <= prev);
    prev = lr_schedule(e, cfg);
  }
  CHECK_THROWS_AS(lr_schedule(-1, cfg), ContractError);
}

TEST_CASE("sample_batch: determinism, bounds, flips") {
  Config cfg = tiny_config();
  Dataset ds = tiny_dataset(1, 6, 24);  // images larger than the patch

  Batch b1 = sample_batch_at(ds, cfg, 3, 5);
  Batch b2 = sample_batch_at(ds, cfg, 3, 5);
  CHECK(oracle::bits_equal(b1.degraded, b2.degraded));
  CHECK(oracle::bits_equal(b1.clean, b2.clean));
  CHECK(oracle::bits_equal(b1.mask, b2.mask));

  Batch b3 = sample_batch_at(ds, cfg, 3, 6);
  CHECK_FALSE(oracle::bits_equal(b1.degraded, b3.degraded));

  CHECK(b1.degraded.shape() == Shape{2, 3, 16, 16});
  CHECK(b1.mask.shape() == Shape{2, 1, 16, 16});
  for (int64_t i = 0; i < b1.degraded.numel(); ++i) {
    CHECK(b1.degraded.data()[i] >= 0.0);
    CHECK(b1.degraded.data()[i] <= 1.0);
  }

  // masks pass through crops and flips untouched
  for (int64_t i = 0; i < b1.mask.numel(); ++i)
    CHECK((b1.mask.data()[i] == 0.0 || b1.mask.data()[i] == 1.0));
}

TEST_CASE("sample_batch applies one transform to all three planes") {
  // degraded == clean and mask == [R > 0.5] pointwise; a crop+flip applied
  // identically preserves both relations on the batch tensors.
  Config cfg = tiny_config();
  Dataset ds;
  Rng rng(77);
  for (int i = 0; i < 3; ++i) {
    ImageTriple t;
    t.clean = gen_clean_image(rng, 24, 24);
    t.degraded = t.clean;
    t.mask = MaskImage(24, 24);
    for (int64_t y = 0; y < 24; ++y)
      for (int64_t x = 0; x < 24; ++x) t.mask.at(y, x) = t.clean.at(0, y, x) > 0.5 ? 1.0 : 0.0;
    ds.ids.push_back("p" + std::to_string(i));
    ds.items.push_back(std::move(t));
  }
  for (int64_t bi = 0; bi < 8; ++bi) {
    Batch b = sample_batch_at(ds, cfg, 0, bi);
    CHECK(oracle::bits_equal(b.degraded, b.clean));
    for (int64_t n = 0; n < cfg.batch; ++n)
      for (int64_t y = 0; y < cfg.patch; ++y)
        for (int64_t x = 0; x < cfg.patch; ++x)
          CHECK(b.mask.at(n, 0, y, x) == (b.clean.at(n, 0, y, x) > 0.5 ? 1.0 : 0.0));
  }

  // flip is an involution: mirroring a sampled window twice restores it
  Batch base = sample_batch_at(ds, cfg, 1, 0);
  const int64_t P = cfg.patch;
  Tensor mirrored(base.clean.shape());
  for (int64_t n = 0; n < cfg.batch; ++n)
    for (int64_t c = 0; c < 3; ++c)
      for (int64_t y = 0; y < P; ++y)
        for (int64_t x = 0; x < P; ++x)
          mirrored.at(n, c, y, x) = base.clean.at(n, c, y, P - 1 - x);
  Tensor restored(base.clean.shape());
  for (int64_t n = 0; n < cfg.batch; ++n)
    for (int64_t c = 0; c < 3; ++c)
      for (int64_t y = 0; y < P; ++y)
        for (int64_t x = 0; x < P; ++x)
          restored.at(n, c, y, x) = mirrored.at(n, c, y, P - 1 - x);
  CHECK(oracle::bits_equal(restored, base.clean));
}

TEST_CASE("stage 1 smoke: loss decreases, determinism, checkpoint round trip") {
  Config cfg = tiny_config();
  cfg.epochs = 5;
  Dataset train = tiny_dataset(2, 8);
  Dataset test = tiny_dataset(3, 2);

  StageOutput a = train_mask_stage(cfg, train, test, "");
  REQUIRE(a.log.rows.size() == 5);
  CHECK(a.log.rows.back().loss_main < a.log.rows.front().loss_main);

  StageOutput b = train_mask_stage(cfg, train, test, "");
  CHECK(a.log.to_csv() == b.log.to_csv());
  REQUIRE(a.checkpoint.params.size() == b.checkpoint.params.size());
  for (size_t i = 0; i < a.checkpoint.params.size(); ++i)
    CHECK(oracle::bits_equal(a.checkpoint.params.tensor(i), b.checkpoint.params.tensor(i)));
}

TEST_CASE("stage 2: freeze contract, lambda=0 equals pure-L1 updates") {
  Config cfg = tiny_config();
  cfg.epochs = 1;
  Dataset train = tiny_dataset(4, 6);
  Dataset test = tiny_dataset(5, 2);

  Config mask_cfg = cfg;
  mask_cfg.epochs = 2;
  StageOutput stage1 = train_mask_stage(mask_cfg, train, test, "");

  // freeze contract: stage-1 parameters bit-identical before and after
  std::vector<Tensor> before;
  for (size_t i = 0; i < stage1.checkpoint.params.size(); ++i)
    before.push_back(stage1.checkpoint.params.tensor(i).clone());

  StageOutput stage2 = train_restore_stage(cfg, train, test, stage1.checkpoint, "");
  for (size_t i = 0; i < stage1.checkpoint.params.size(); ++i)
    CHECK(oracle::bits_equal(stage1.checkpoint.params.tensor(i), before[i]));

  // stage-2 checkpoint holds net.* and distill.* parameters
  CHECK(stage2.checkpoint.params.subset("net.").size() > 0);
  CHECK(stage2.checkpoint.params.subset("distill.").size() > 0);

  // lambda 0: R is computed and logged but never affects the updates
  Config zeroed = cfg;
  zeroed.lambda_distill = 0.0;
  Rng init_probe = Rng(zeroed.seed).fork("distill_init");
  DistillParams fresh = init_distill(zeroed.net(), init_probe);
  StageOutput with_r = train_restore_stage(zeroed, train, test, stage1.checkpoint, "");
  CHECK(with_r.log.rows.back().loss_distill > 0.0);

  // distill parameters see exactly-zero gradients, so Adam leaves them at
  // their initial values
  ParamSet trained_distill = with_r.checkpoint.params.subset("distill.");
  REQUIRE(trained_distill.size() == fresh.params.size());
  for (size_t i = 0; i < fresh.params.size(); ++i)
    CHECK(oracle::bits_equal(trained_distill.get(fresh.params.name(i)),
                             fresh.params.tensor(i)));
}

TEST_CASE("lambda=0 gradients equal the pure-L1 gradients bitwise") {
  Config cfg = tiny_config();
  const NetConfig net = cfg.net();
  Dataset data = tiny_dataset(9, 2);

  Rng mr(21);
  ParamSet mask_params = init_mask_network(net, mr);
  Rng rr(22);
  ParamSet params_a = init_restore_network(net, rr);
  Rng rr2(22);
  ParamSet params_b = init_restore_network(net, rr2);
  Rng dr(23);
  DistillParams dp = init_distill(net, dr);
  params_a.set_requires_grad(true);
  params_b.set_requires_grad(true);
  dp.params.set_requires_grad(true);

  Batch batch = sample_batch_at(data, cfg, 0, 0);
  MaskForwardResult teacher = mask_forward(net, mask_params, batch.degraded);

  {
    Tape tape;
    TapeScope scope(tape);
    RestoreForwardResult s = restore_forward(net, params_a, batch.degraded, teacher.prob_mask);
    Tensor l1 = ops::l1_loss(s.restored, batch.clean);
    DistillLossResult r = total_distill_loss(dp, s.taps, teacher.taps);
    Tensor total = ops::add(l1, ops::scale(r.loss, 0.0));
    params_a.zero_grads();
    dp.params.zero_grads();
    tape.backward(total);
  }
  {
    Tape tape;
    TapeScope scope(tape);
    RestoreForwardResult s = restore_forward(net, params_b, batch.degraded, teacher.prob_mask);
    Tensor l1 = ops::l1_loss(s.restored, batch.clean);
    params_b.zero_grads();
    tape.backward(l1);
  }

  for (size_t i = 0; i < params_a.size(); ++i) {
    const Tensor& a = params_a.tensor(i);
    const Tensor& b = params_b.get(params_a.name(i));
    for (int64_t j = 0; j < a.numel(); ++j) CHECK(a.grad()[j] == b.grad()[j]);
  }
  // distill parameters receive exactly zero gradient
  for (size_t i = 0; i < dp.params.size(); ++i) {
    const Tensor& t = dp.params.tensor(i);
    for (int64_t j = 0; j < t.numel(); ++j) CHECK(t.grad()[j] == 0.0);
  }
}

TEST_CASE("resume reproduces the uninterrupted run exactly") {
  Config cfg = tiny_config();
  cfg.epochs = 3;
  Dataset train = tiny_dataset(6, 6);
  Dataset test = tiny_dataset(7, 2);

  StageOutput full = train_mask_stage(cfg, train, test, "");

  Config head_cfg = cfg;
  head_cfg.epochs = 2;
  StageOutput head = train_mask_stage(head_cfg, train, test, "");
  StageOutput tail = train_mask_stage(cfg, train, test, "", &head.checkpoint);

  REQUIRE(tail.log.rows.size() == 1);
  CHECK(tail.log.rows[0].epoch == 2);
  CHECK(tail.log.rows[0].loss_main == full.log.rows[2].loss_main);
  for (size_t i = 0; i < full.checkpoint.params.size(); ++i)
    CHECK(oracle::bits_equal(full.checkpoint.params.tensor(i), tail.checkpoint.params.tensor(i)));

  // resuming under a different config is rejected
  Config other = cfg;
  other.tau = 0.9;
  CHECK_THROWS_AS(train_mask_stage(other, train, test, "", &head.checkpoint), ContractError);
}

TEST_CASE("evaluate_dataset: identity restoration scores PSNR(in) == PSNR(out)") {
  Config cfg = tiny_config();
  const NetConfig net = cfg.net();
  Dataset test = tiny_dataset(8, 3);

  Rng mr(1);
  ParamSet mask_params = init_mask_network(net, mr);
  Rng rr(2);
  ParamSet net_params = init_restore_network(net, rr);  // zero head: identity

  MetricReport report = evaluate_dataset(net, mask_params, net_params, test);
  REQUIRE(report.evaluated == 3);
  for (const EvalRow& r : report.rows) CHECK(r.psnr_out == r.psnr_in);

  // aggregates equal recomputation from rows
  double acc = 0.0;
  for (const EvalRow& r : report.rows) acc += r.psnr_out;
  CHECK(report.mean_psnr_out == doctest::Approx(acc / 3.0).epsilon(1e-15));

  // self-evaluation: clean inputs, identity net => 100 dB / SSIM 1
  Dataset selfset;
  for (size_t i = 0; i < test.items.size(); ++i) {
    ImageTriple t;
    t.clean = test.items[i].clean;
    t.degraded = test.items[i].clean;
    t.mask = MaskImage(t.clean.h, t.clean.w);
    selfset.ids.push_back(test.ids[i]);
    selfset.items.push_back(std::move(t));
  }
  MetricReport self = evaluate_dataset(net, mask_params, net_params, selfset);
  CHECK(self.mean_psnr_out == 100.0);
  CHECK(self.mean_ssim_out == doctest::Approx(1.0).epsilon(1e-12));

  // threaded evaluation is identical to sequential
  MetricReport threaded = evaluate_dataset(net, mask_params, net_params, test, 2);
  REQUIRE(threaded.rows.size() == report.rows.size());
  for (size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(threaded.rows[i].psnr_out == report.rows[i].psnr_out);
    CHECK(threaded.rows[i].ssim_out == report.rows[i].ssim_out);
  }
}

TEST_CASE("run_inference pads non-divisible images and crops back") {
  Config cfg = tiny_config();
  const NetConfig net = cfg.net();
  Rng mr(31);
  ParamSet mask_params = init_mask_network(net, mr);
  Rng rr(32);
  ParamSet net_params = init_restore_network(net, rr);  // identity at init

  Rng ir(33);
  Image odd = gen_clean_image(ir, 20, 27);  // divisor for 2 levels is 8
  InferenceResult res = run_inference(net, mask_params, net_params, odd);
  CHECK(res.restored.h == 20);
  CHECK(res.restored.w == 27);
  CHECK(res.prob_mask.h == 20);
  CHECK(res.prob_mask.w == 27);
  // identity net: restored equals the input on the unpadded region
  for (size_t i = 0; i < odd.data.size(); ++i) CHECK(res.restored.data[i] == odd.data[i]);
  for (double v : res.prob_mask.data) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("evaluate_dir lists unreadable triples and excludes them") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mgrs_evaldir_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  Config cfg = tiny_config();
  Dataset ds = tiny_dataset(10, 3);
  for (size_t i = 0; i < ds.size(); ++i) write_triple(dir.string(), ds.ids[i], ds.items[i]);
  {
    std::ofstream bad(dir / "t1_degraded.ppm", std::ios::trunc | std::ios::binary);
    bad << "P6\n16 16\n255\nshort";
  }

  const NetConfig net = cfg.net();
  Rng mr(41);
  ParamSet mask_params = init_mask_network(net, mr);
  Rng rr(42);
  ParamSet net_params = init_restore_network(net, rr);
  MetricReport report = evaluate_dir(net, mask_params, net_params, dir.string());
  CHECK(report.failed == 1);
  CHECK(report.evaluated == 2);
  bool found_error_row = false;
  for (const EvalRow& r : report.rows)
    if (!r.ok && r.id == "t1") found_error_row = true;
  CHECK(found_error_row);

  // aggregates recompute from the ok rows only
  double acc = 0.0;
  int64_t n = 0;
  for (const EvalRow& r : report.rows)
    if (r.ok) {
      acc += r.psnr_out;
      ++n;
    }
  CHECK(n == 2);
  CHECK(report.mean_psnr_out == doctest::Approx(acc / 2.0).epsilon(1e-15));
  fs::remove_all(dir);
}

TEST_CASE("train log csv format") {
  TrainLog log;
  TrainLogRow row;
  row.epoch = 0;
  row.loss_main = 0.5;
  row.loss_distill = 0.25;
  row.lr = 1e-4;
  row.psnr = 20.0;
  row.ssim = 0.9;
  row.iou = 0.8;
  row.wall_seconds = 123.0;  // must not appear in the CSV
  log.rows.push_back(row);
  const std::string csv = log.to_csv();
  CHECK(csv.find("epoch,loss_l1,loss_R,lr,psnr,ssim,iou") == 0);
  CHECK(csv.find("123") == std::string::npos);
}
