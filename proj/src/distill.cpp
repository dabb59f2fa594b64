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

#include "mgrs/distill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgrs {

namespace {

std::string pair_prefix(int64_t p, int64_t q) {
  return "p" + std::to_string(p) + "q" + std::to_string(q);
}

int64_t conv_count(int64_t cin, int64_t cout) { return cout * cin + cout; }  // 1x1

void add_1x1(ParamSet& ps, Rng& rng, const std::string& prefix, int64_t cin, int64_t cout,
             bool zero_init) {
  Tensor w = zero_init ? Tensor::zeros({cout, cin, 1, 1})
                       : Tensor::he_normal({cout, cin, 1, 1}, rng, cin);
  ps.add(prefix + ".w", std::move(w));
  ps.add(prefix + ".b", Tensor::zeros({1, cout, 1, 1}));
}

ConvParams at_1x1(ParamSet& ps, const std::string& prefix) {
  return ConvParams{ps.get(prefix + ".w"), ps.get(prefix + ".b"), 1, 0};
}

int64_t hidden_of(int64_t c) { return std::max<int64_t>(1, c / 2); }

}  // namespace

DistillParams init_distill(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  DistillParams dp;
  dp.m = cfg.levels;
  for (int64_t p = 1; p <= dp.m; ++p) {
    for (int64_t q = 1; q <= dp.m; ++q) {
      const std::string pre = pair_prefix(p, q);
      const int64_t cp = restore_tap_channels(cfg, p);
      const int64_t cq = mask_tap_channels(cfg, q);
      const int64_t hid = hidden_of(cq);
      add_1x1(dp.params, rng, pre + ".reg", cp, cq, false);
      add_1x1(dp.params, rng, pre + ".rho1", cq, hid, false);
      add_1x1(dp.params, rng, pre + ".rho2", hid, cq, true);
      add_1x1(dp.params, rng, pre + ".alpha1", cq, hid, false);
      add_1x1(dp.params, rng, pre + ".alpha2", hid, 1, true);
    }
  }
  return dp;
}

int64_t distill_param_count(const NetConfig& cfg) {
  int64_t total = 0;
  for (int64_t p = 1; p <= cfg.levels; ++p) {
    for (int64_t q = 1; q <= cfg.levels; ++q) {
      const int64_t cp = restore_tap_channels(cfg, p);
      const int64_t cq = mask_tap_channels(cfg, q);
      const int64_t hid = hidden_of(cq);
      total += conv_count(cp, cq) + conv_count(cq, hid) + conv_count(hid, cq) +
               conv_count(cq, hid) + conv_count(hid, 1);
    }
  }
  return total;
}

MatchedPair match_dims(DistillParams& dp, int64_t p, int64_t q, const FeatureTap& student,
                       const FeatureTap& teacher) {
  if (student.feature.shape().n != teacher.feature.shape().n)
    throw ContractError("match_dims: taps from different batches");
  MatchedPair out;
  out.student = conv2d(student.feature, at_1x1(dp.params, pair_prefix(p, q) + ".reg"));
  Tensor t = teacher.feature.detach();
  const Shape ss = student.feature.shape();
  if (t.shape().h != ss.h || t.shape().w != ss.w)
    t = resize(t, ss.h, ss.w, ResizeMode::kBilinear);
  out.teacher = t;
  return out;
}

Tensor rho_weights(DistillParams& dp, int64_t p, int64_t q, const Tensor& teacher_tap) {
  const std::string pre = pair_prefix(p, q);
  Tensor g = global_avg_pool(teacher_tap.detach());
  Tensor h = ops::relu(conv2d(g, at_1x1(dp.params, pre + ".rho1")));
  Tensor logits = conv2d(h, at_1x1(dp.params, pre + ".rho2"));
  return ops::mean_batch(ops::softmax_channels(logits));
}

Tensor pair_loss(const Tensor& student, const Tensor& teacher, const Tensor& rho) {
  const Shape ss = student.shape();
  if (!(ss == teacher.shape()))
    throw ContractError("pair_loss: shape mismatch " + ss.str() + " vs " +
                        teacher.shape().str());
  if (!(rho.shape() == Shape{1, ss.c, 1, 1}))
    throw ContractError("pair_loss: rho shape " + rho.shape().str() + " != (1," +
                        std::to_string(ss.c) + ",1,1)");
  Tensor d = ops::sub(student, teacher);
  Tensor sq = ops::mul(d, d);
  Tensor per_channel = ops::sum_spatial(sq);       // (N,C,1,1)
  Tensor weighted = ops::mul(per_channel, rho);    // rho broadcast over batch
  Tensor total = ops::sum_all(weighted);
  const double norm = 1.0 / static_cast<double>(ss.n * ss.h * ss.w);
  return ops::scale(total, norm);
}

double DistillWeights::rho_entropy(size_t pair) const {
  double e = 0.0;
  for (double v : rho[pair])
    if (v > 0.0) e -= v * std::log(v);
  return e;
}

DistillLossResult total_distill_loss(DistillParams& dp,
                                     const std::vector<FeatureTap>& student_taps,
                                     const std::vector<FeatureTap>& teacher_taps) {
  const int64_t m = dp.m;
  if (static_cast<int64_t>(student_taps.size()) != m ||
      static_cast<int64_t>(teacher_taps.size()) != m)
    throw ContractError("total_distill_loss: expected " + std::to_string(m) +
                        " taps per network");

  std::vector<Tensor> losses;
  std::vector<Tensor> rhos;
  Tensor logits;  // (1, m*m, 1, 1) after stacking
  for (int64_t p = 1; p <= m; ++p) {
    for (int64_t q = 1; q <= m; ++q) {
      const FeatureTap& sp = student_taps[static_cast<size_t>(p - 1)];
      const FeatureTap& tq = teacher_taps[static_cast<size_t>(q - 1)];
      MatchedPair matched = match_dims(dp, p, q, sp, tq);
      Tensor rho = rho_weights(dp, p, q, tq.feature);
      losses.push_back(pair_loss(matched.student, matched.teacher, rho));
      rhos.push_back(rho);

      const std::string pre = pair_prefix(p, q);
      Tensor g = global_avg_pool(tq.feature.detach());
      Tensor h = ops::relu(conv2d(g, at_1x1(dp.params, pre + ".alpha1")));
      Tensor logit = ops::mean_batch(conv2d(h, at_1x1(dp.params, pre + ".alpha2")));
      logits = logits.defined() ? ops::concat_channels(logits, logit) : logit;
    }
  }

  Tensor alpha = ops::softmax_channels(logits);  // (1, m*m, 1, 1)
  Tensor stacked;
  for (Tensor& l : losses)
    stacked = stacked.defined() ? ops::concat_channels(stacked, l) : l;
  Tensor weighted = ops::mul(stacked, alpha);

  DistillLossResult out;
  out.loss = ops::sum_all(weighted);
  out.weights.alpha.assign(alpha.data(), alpha.data() + alpha.numel());
  for (Tensor& r : rhos)
    out.weights.rho.emplace_back(r.data(), r.data() + r.numel());
  return out;
}

void set_identity_regressor(DistillParams& dp, int64_t p, int64_t q) {
  Tensor& w = dp.params.get(pair_prefix(p, q) + ".reg.w");
  const Shape s = w.shape();
  if (s.n != s.c)
    throw ContractError("identity regressor needs equal channel counts, got " + s.str());
  std::fill(w.data(), w.data() + w.numel(), 0.0);
  for (int64_t c = 0; c < s.n; ++c) w.at(c, c, 0, 0) = 1.0;
  Tensor& b = dp.params.get(pair_prefix(p, q) + ".reg.b");
  std::fill(b.data(), b.data() + b.numel(), 0.0);
}

}  // namespace mgrs
