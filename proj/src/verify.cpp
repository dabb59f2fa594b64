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

#include "mgrs/verify.hpp"

#include <chrono>
#include <functional>

#include "mgrs/distill.hpp"
#include "mgrs/gradcheck.hpp"
#include "mgrs/layers.hpp"
#include "mgrs/networks.hpp"
#include "mgrs/synth.hpp"
#include "mgrs/tensor.hpp"

namespace mgrs {

namespace {

constexpr double kOpTol = 1e-6;
constexpr double kEndToEndTol = 1e-5;

// Values bounded away from zero so ReLU/L1 kinks sit farther than the FD
// step from the evaluation point.
Tensor signed_away_from_zero(const Shape& s, Rng& rng, double lo = 0.1, double hi = 1.0) {
  Tensor t(s);
  for (int64_t i = 0; i < t.numel(); ++i) {
    const double mag = rng.uniform(lo, hi);
    t.data()[i] = (rng.next_u64() & 1) ? mag : -mag;
  }
  return t;
}

// Scalar probe: sum(op_out * fixed_weights) makes every output coordinate
// matter.
Tensor probe(const Tensor& out, const Tensor& weights) {
  return ops::sum_all(ops::mul(out, weights));
}

struct Suite {
  VerifyReport report;
  Rng rng{20260809};

  void run(const std::string& name, ParamSet& params, const std::function<Tensor()>& builder,
           double tol, int64_t coords_per_param = -1) {
    GradCheckOptions opt;
    opt.coords_per_param = coords_per_param;
    VerifyEntry entry;
    entry.name = name;
    entry.tolerance = tol;
    const GradCheckResult r = gradcheck(params, builder, opt);
    entry.max_rel_err = r.max_rel_err;
    entry.coords = r.coords_checked;
    entry.pass = r.pass(tol);
    if (!r.finite) entry.diagnostic = r.diagnostic;
    report.entries.push_back(entry);
  }
};

void add_elementwise_checks(Suite& s) {
  const Shape sh{2, 3, 4, 4};
  Tensor w1 = Tensor::uniform(sh, s.rng, -1.0, 1.0);

  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    ps.add("b", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    s.run("add", ps, [&] { return probe(ops::add(ps.get("a"), ps.get("b")), w1); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    ps.add("b", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    s.run("sub", ps, [&] { return probe(ops::sub(ps.get("a"), ps.get("b")), w1); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    ps.add("b", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    s.run("mul", ps, [&] { return probe(ops::mul(ps.get("a"), ps.get("b")), w1); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    ps.add("m", Tensor::uniform({2, 1, 4, 4}, s.rng, 0.0, 1.0));
    s.run("mul broadcast mask", ps,
          [&] { return probe(ops::mul(ps.get("a"), ps.get("m")), w1); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    s.run("scale", ps, [&] { return probe(ops::scale(ps.get("a"), -1.7), w1); }, kOpTol);
  }
}

void add_reduce_activation_checks(Suite& s) {
  const Shape sh{2, 4, 3, 3};
  Tensor wsp = Tensor::uniform({2, 4, 1, 1}, s.rng, -1.0, 1.0);
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -2.0, 2.0));
    s.run("reduce sum all", ps, [&] { return ops::sum_all(ps.get("a")); }, kOpTol);
    s.run("reduce mean all", ps, [&] { return ops::mean_all(ps.get("a")); }, kOpTol);
    s.run("reduce sum spatial", ps,
          [&] { return probe(ops::sum_spatial(ps.get("a")), wsp); }, kOpTol);
    s.run("reduce mean spatial", ps,
          [&] { return probe(ops::mean_spatial(ps.get("a")), wsp); }, kOpTol);
    s.run("global_avg_pool", ps,
          [&] { return probe(global_avg_pool(ps.get("a")), wsp); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", signed_away_from_zero(sh, s.rng));
    Tensor w = Tensor::uniform(sh, s.rng, -1.0, 1.0);
    s.run("relu", ps, [&, w] { return probe(ops::relu(ps.get("a")), w); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform(sh, s.rng, -3.0, 3.0));
    Tensor w = Tensor::uniform(sh, s.rng, -1.0, 1.0);
    s.run("sigmoid", ps, [&, w] { return probe(ops::sigmoid(ps.get("a")), w); }, kOpTol);
    s.run("softmax_channels", ps,
          [&, w] { return probe(ops::softmax_channels(ps.get("a")), w); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform({3, 4, 2, 2}, s.rng, -1.0, 1.0));
    Tensor w = Tensor::uniform({1, 4, 2, 2}, s.rng, -1.0, 1.0);
    s.run("mean_batch", ps, [&, w] { return probe(ops::mean_batch(ps.get("a")), w); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("a", Tensor::uniform({2, 3, 3, 3}, s.rng, -1.0, 1.0));
    ps.add("b", Tensor::uniform({2, 2, 3, 3}, s.rng, -1.0, 1.0));
    Tensor w = Tensor::uniform({2, 5, 3, 3}, s.rng, -1.0, 1.0);
    s.run("concat_channels", ps,
          [&, w] { return probe(ops::concat_channels(ps.get("a"), ps.get("b")), w); }, kOpTol);
  }
}

void add_loss_checks(Suite& s) {
  const Shape sh{2, 3, 4, 4};
  {
    // Differences bounded away from zero keep |.| smooth around the probe.
    ParamSet ps;
    Tensor target = Tensor::uniform(sh, s.rng, -1.0, 1.0);
    Tensor offset = signed_away_from_zero(sh, s.rng, 0.05, 0.5);
    Tensor pred(sh);
    for (int64_t i = 0; i < pred.numel(); ++i)
      pred.data()[i] = target.data()[i] + offset.data()[i];
    ps.add("pred", pred);
    s.run("l1_loss", ps, [&, target] { return ops::l1_loss(ps.get("pred"), target); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("pred", Tensor::uniform(sh, s.rng, 0.1, 0.9));
    Tensor target(sh);
    for (int64_t i = 0; i < target.numel(); ++i)
      target.data()[i] = (s.rng.next_u64() & 1) ? 1.0 : 0.0;
    s.run("bce_loss", ps, [&, target] { return ops::bce_loss(ps.get("pred"), target); },
          kOpTol);
  }
}

void add_layer_checks(Suite& s) {
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({2, 3, 4, 4}, s.rng, -1.0, 1.0));
    ps.add("w", Tensor::uniform({4, 3, 3, 3}, s.rng, -0.5, 0.5));
    ps.add("b", Tensor::uniform({1, 4, 1, 1}, s.rng, -0.5, 0.5));
    Tensor probe_w = Tensor::uniform({2, 4, 4, 4}, s.rng, -1.0, 1.0);
    s.run("conv2d 3x3 s1 p1", ps, [&, probe_w] {
      ConvParams p{ps.get("w"), ps.get("b"), 1, 1};
      return probe(conv2d(ps.get("x"), p), probe_w);
    }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({1, 2, 5, 5}, s.rng, -1.0, 1.0));
    ps.add("w", Tensor::uniform({4, 2, 3, 3}, s.rng, -0.5, 0.5));
    ps.add("b", Tensor::uniform({1, 4, 1, 1}, s.rng, -0.5, 0.5));
    Tensor probe_w = Tensor::uniform({1, 4, 3, 3}, s.rng, -1.0, 1.0);
    s.run("conv2d 3x3 s2 p1", ps, [&, probe_w] {
      ConvParams p{ps.get("w"), ps.get("b"), 2, 1};
      return probe(conv2d(ps.get("x"), p), probe_w);
    }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({2, 4, 3, 3}, s.rng, -1.0, 1.0));
    ps.add("w", Tensor::uniform({2, 4, 1, 1}, s.rng, -0.5, 0.5));
    ps.add("b", Tensor::uniform({1, 2, 1, 1}, s.rng, -0.5, 0.5));
    Tensor probe_w = Tensor::uniform({2, 2, 3, 3}, s.rng, -1.0, 1.0);
    s.run("conv2d 1x1", ps, [&, probe_w] {
      ConvParams p{ps.get("w"), ps.get("b"), 1, 0};
      return probe(conv2d(ps.get("x"), p), probe_w);
    }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({1, 2, 4, 4}, s.rng, -1.0, 1.0));
    Tensor w = Tensor::uniform({1, 8, 2, 2}, s.rng, -1.0, 1.0);
    s.run("pixel_unshuffle", ps,
          [&, w] { return probe(pixel_unshuffle(ps.get("x"), 2), w); }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({1, 8, 2, 2}, s.rng, -1.0, 1.0));
    Tensor w = Tensor::uniform({1, 2, 4, 4}, s.rng, -1.0, 1.0);
    s.run("pixel_shuffle", ps, [&, w] { return probe(pixel_shuffle(ps.get("x"), 2), w); },
          kOpTol);
  }
  {
    ParamSet ps;
    ps.add("x", Tensor::uniform({1, 2, 3, 3}, s.rng, -1.0, 1.0));
    Tensor w6 = Tensor::uniform({1, 2, 6, 6}, s.rng, -1.0, 1.0);
    Tensor w2 = Tensor::uniform({1, 2, 2, 2}, s.rng, -1.0, 1.0);
    s.run("resize nearest x2", ps,
          [&, w6] { return probe(resize(ps.get("x"), 6, 6, ResizeMode::kNearest), w6); },
          kOpTol);
    s.run("resize bilinear up", ps,
          [&, w6] { return probe(resize(ps.get("x"), 6, 6, ResizeMode::kBilinear), w6); },
          kOpTol);
    s.run("resize bilinear down", ps,
          [&, w2] { return probe(resize(ps.get("x"), 2, 2, ResizeMode::kBilinear), w2); },
          kOpTol);
  }
  {
    ParamSet ps;
    ps.add("f", Tensor::uniform({1, 3, 4, 4}, s.rng, -1.0, 1.0));
    ps.add("w", Tensor::uniform({3, 3, 3, 3}, s.rng, -0.5, 0.5));
    ps.add("b", Tensor::uniform({1, 3, 1, 1}, s.rng, -0.5, 0.5));
    Tensor mask = Tensor::uniform({1, 1, 2, 2}, s.rng, 0.0, 1.0);
    Tensor w = Tensor::uniform({1, 3, 4, 4}, s.rng, -1.0, 1.0);
    s.run("gated_block", ps, [&, mask, w] {
      GateBlockParams p{ConvParams{ps.get("w"), ps.get("b"), 1, 1}};
      return probe(gated_block(ps.get("f"), mask, p), w);
    }, kOpTol);
  }
}

void add_distill_checks(Suite& s) {
  NetConfig cfg;
  cfg.levels = 2;
  cfg.mask_base_channels = 2;
  cfg.restore_base_channels = 2;

  {
    Rng init = s.rng.fork("distill-check");
    DistillParams dp = init_distill(cfg, init);
    ParamSet ps;
    ps.absorb("", dp.params);
    Tensor teacher = Tensor::uniform({2, 2, 4, 4}, s.rng, -1.0, 1.0);
    Tensor w = Tensor::uniform({1, 2, 1, 1}, s.rng, -1.0, 1.0);
    s.run("rho_weights", ps, [&, teacher, w]() mutable {
      return probe(rho_weights(dp, 1, 1, teacher), w);
    }, kOpTol);
  }
  {
    ParamSet ps;
    ps.add("student", Tensor::uniform({2, 3, 4, 4}, s.rng, -1.0, 1.0));
    ps.add("rho_logits", Tensor::uniform({1, 3, 1, 1}, s.rng, -1.0, 1.0));
    Tensor teacher = Tensor::uniform({2, 3, 4, 4}, s.rng, -1.0, 1.0);
    s.run("pair_loss", ps, [&, teacher] {
      Tensor rho = ops::softmax_channels(ps.get("rho_logits"));
      return pair_loss(ps.get("student"), teacher, rho);
    }, kOpTol);
  }
  {
    Rng init = s.rng.fork("distill-total");
    DistillParams dp = init_distill(cfg, init);
    ParamSet ps;
    ps.add("s1", Tensor::uniform({2, 2, 8, 8}, s.rng, -1.0, 1.0));
    ps.add("s2", Tensor::uniform({2, 4, 4, 4}, s.rng, -1.0, 1.0));
    ps.absorb("dp.", dp.params);
    std::vector<FeatureTap> teacher_taps{{1, Tensor::uniform({2, 2, 8, 8}, s.rng, -1.0, 1.0)},
                                         {2, Tensor::uniform({2, 4, 4, 4}, s.rng, -1.0, 1.0)}};
    s.run("total_distill_loss", ps, [&, teacher_taps]() mutable {
      DistillParams view;
      view.m = 2;
      view.params = ps.subset("dp.");
      std::vector<FeatureTap> student_taps{{1, ps.get("s1")}, {2, ps.get("s2")}};
      return total_distill_loss(view, student_taps, teacher_taps).loss;
    }, kOpTol);
  }
}

void add_end_to_end_check(Suite& s) {
  NetConfig cfg;
  cfg.levels = 2;
  cfg.mask_base_channels = 8;
  cfg.restore_base_channels = 16;
  cfg.gated_decoder = true;

  Rng rng(424242);
  const Image clean = gen_clean_image(rng, 16, 16);
  RainParams rp;
  rp.seed = 11;
  rp.streak_count = 5;
  const DegradedPair pair = synth_rain(clean, rp);
  const Tensor degraded = image_to_tensor(pair.degraded);
  const Tensor clean_t = image_to_tensor(clean);

  Rng mask_init = rng.fork("mask");
  ParamSet mask_params = init_mask_network(cfg, mask_init);
  const MaskForwardResult teacher = mask_forward(cfg, mask_params, degraded);

  Rng restore_init = rng.fork("restore");
  ParamSet net_params = init_restore_network(cfg, restore_init);
  Rng distill_init = rng.fork("distill");
  DistillParams dp = init_distill(cfg, distill_init);
  // A zero head keeps the loss flat in several directions at init; nudge it.
  Tensor& head = net_params.get("head.w");
  Rng head_rng = rng.fork("head");
  for (int64_t i = 0; i < head.numel(); ++i) head.data()[i] = head_rng.uniform(-0.05, 0.05);

  ParamSet all;
  all.absorb("net.", net_params);
  all.absorb("distill.", dp.params);

  auto builder = [&, teacher, degraded, clean_t]() mutable {
    ParamSet net_view = all.subset("net.");
    DistillParams dp_view;
    dp_view.m = cfg.levels;
    dp_view.params = all.subset("distill.");
    RestoreForwardResult student = restore_forward(cfg, net_view, degraded, teacher.prob_mask);
    Tensor l1 = ops::l1_loss(student.restored, clean_t);
    DistillLossResult r = total_distill_loss(dp_view, student.taps, teacher.taps);
    return ops::add(l1, ops::scale(r.loss, 0.1));
  };
  s.run("stage-2 composed loss (16x16, 2 levels)", all, builder, kEndToEndTol,
        /*coords_per_param=*/3);
}

}  // namespace

VerifyReport run_gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Suite suite;
  add_elementwise_checks(suite);
  add_reduce_activation_checks(suite);
  add_loss_checks(suite);
  add_layer_checks(suite);
  add_distill_checks(suite);
  add_end_to_end_check(suite);
  suite.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return suite.report;
}

}  // namespace mgrs
