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

#include "mgrs/networks.hpp"

#include <string>

namespace mgrs {

namespace {

// conv weight+bias element count
int64_t conv_count(int64_t cin, int64_t cout, int64_t k) { return cout * cin * k * k + cout; }

void add_conv(ParamSet& ps, Rng& rng, const std::string& prefix, int64_t cin, int64_t cout,
              int64_t k, bool zero_init = false) {
  Tensor w = zero_init ? Tensor::zeros({cout, cin, k, k})
                       : Tensor::he_normal({cout, cin, k, k}, rng, cin * k * k);
  ps.add(prefix + ".w", std::move(w));
  ps.add(prefix + ".b", Tensor::zeros({1, cout, 1, 1}));
}

ConvParams conv_at(ParamSet& ps, const std::string& prefix, int64_t stride, int64_t pad) {
  return ConvParams{ps.get(prefix + ".w"), ps.get(prefix + ".b"), stride, pad};
}

Tensor conv_relu(ParamSet& ps, const std::string& prefix, const Tensor& x, int64_t stride = 1,
                 int64_t pad = 1) {
  return ops::relu(conv2d(x, conv_at(ps, prefix, stride, pad)));
}

}  // namespace

void NetConfig::validate() const {
  if (levels < 2) throw ContractError("NetConfig: levels must be >= 2");
  if (mask_base_channels < 1 || restore_base_channels < 1)
    throw ContractError("NetConfig: base channels must be >= 1");
}

int64_t mask_tap_channels(const NetConfig& cfg, int64_t level) {
  return cfg.mask_base_channels << (level - 1);
}

int64_t restore_tap_channels(const NetConfig& cfg, int64_t level) {
  return cfg.restore_base_channels << (level - 1);
}

// ---------------------------------------------------------------------------
// Mask prediction network (lightweight):
//   stem conv3 3->c1
//   per level l: conv3, conv3 (tap), stride-2 conv3 c_l->c_{l+1}
//   bottleneck: conv3
//   per level l (top-down): nearest x2, conv3 c_{l+1}->c_l, concat tap,
//     conv3 2c_l->c_l
//   head conv3 c1->1, sigmoid
// ---------------------------------------------------------------------------

ParamSet init_mask_network(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  ParamSet ps;
  const int64_t m = cfg.levels;
  auto ch = [&](int64_t l) { return cfg.mask_base_channels << (l - 1); };
  add_conv(ps, rng, "stem", 3, ch(1), 3);
  for (int64_t l = 1; l <= m; ++l) {
    add_conv(ps, rng, "enc" + std::to_string(l) + ".c1", ch(l), ch(l), 3);
    add_conv(ps, rng, "enc" + std::to_string(l) + ".c2", ch(l), ch(l), 3);
    add_conv(ps, rng, "enc" + std::to_string(l) + ".down", ch(l), ch(l + 1), 3);
  }
  add_conv(ps, rng, "bott.c1", ch(m + 1), ch(m + 1), 3);
  for (int64_t l = m; l >= 1; --l) {
    add_conv(ps, rng, "dec" + std::to_string(l) + ".up", ch(l + 1), ch(l), 3);
    add_conv(ps, rng, "dec" + std::to_string(l) + ".merge", 2 * ch(l), ch(l), 3);
  }
  add_conv(ps, rng, "head", ch(1), 1, 3);
  return ps;
}

int64_t mask_param_count(const NetConfig& cfg) {
  const int64_t m = cfg.levels;
  auto ch = [&](int64_t l) { return cfg.mask_base_channels << (l - 1); };
  int64_t total = conv_count(3, ch(1), 3);
  for (int64_t l = 1; l <= m; ++l)
    total += 2 * conv_count(ch(l), ch(l), 3) + conv_count(ch(l), ch(l + 1), 3);
  total += conv_count(ch(m + 1), ch(m + 1), 3);
  for (int64_t l = 1; l <= m; ++l)
    total += conv_count(ch(l + 1), ch(l), 3) + conv_count(2 * ch(l), ch(l), 3);
  total += conv_count(ch(1), 1, 3);
  return total;
}

MaskForwardResult mask_forward(const NetConfig& cfg, ParamSet& params, const Tensor& image) {
  cfg.validate();
  const Shape s = image.shape();
  const int64_t d = cfg.mask_divisor();
  if (s.h % d != 0 || s.w % d != 0)
    throw ShapeError("mask_forward: input " + s.str() + " not divisible by " + std::to_string(d));
  const int64_t m = cfg.levels;

  MaskForwardResult out;
  Tensor x = conv_relu(params, "stem", image);
  for (int64_t l = 1; l <= m; ++l) {
    const std::string enc = "enc" + std::to_string(l);
    x = conv_relu(params, enc + ".c1", x);
    x = conv_relu(params, enc + ".c2", x);
    out.taps.push_back({l, x});
    x = conv_relu(params, enc + ".down", x, 2, 1);
  }
  x = conv_relu(params, "bott.c1", x);
  for (int64_t l = m; l >= 1; --l) {
    const std::string dec = "dec" + std::to_string(l);
    x = resize(x, x.shape().h * 2, x.shape().w * 2, ResizeMode::kNearest);
    x = conv_relu(params, dec + ".up", x);
    x = ops::concat_channels(x, out.taps[static_cast<size_t>(l - 1)].feature);
    x = conv_relu(params, dec + ".merge", x);
  }
  out.prob_mask = ops::sigmoid(conv2d(x, conv_at(params, "head", 1, 1)));
  return out;
}

// ---------------------------------------------------------------------------
// Restoration network:
//   pixel_unshuffle(2), stem conv3 12->c1
//   per level l: conv3, conv3 (tap), stride-2 conv3
//   bottleneck: conv3, conv3
//   per level l (top-down): nearest x2, conv3 c_{l+1}->c_l, concat tap,
//     conv3 2c_l->c_l, conv3 c_l->c_l, gated block (when enabled)
//   head conv3 c1->12 (zero-init), pixel_shuffle(2), + input
// ---------------------------------------------------------------------------

ParamSet init_restore_network(const NetConfig& cfg, Rng& rng) {
  cfg.validate();
  ParamSet ps;
  const int64_t m = cfg.levels;
  auto ch = [&](int64_t l) { return cfg.restore_base_channels << (l - 1); };
  add_conv(ps, rng, "stem", 12, ch(1), 3);
  for (int64_t l = 1; l <= m; ++l) {
    add_conv(ps, rng, "enc" + std::to_string(l) + ".c1", ch(l), ch(l), 3);
    add_conv(ps, rng, "enc" + std::to_string(l) + ".c2", ch(l), ch(l), 3);
    add_conv(ps, rng, "enc" + std::to_string(l) + ".down", ch(l), ch(l + 1), 3);
  }
  add_conv(ps, rng, "bott.c1", ch(m + 1), ch(m + 1), 3);
  add_conv(ps, rng, "bott.c2", ch(m + 1), ch(m + 1), 3);
  for (int64_t l = m; l >= 1; --l) {
    add_conv(ps, rng, "dec" + std::to_string(l) + ".up", ch(l + 1), ch(l), 3);
    add_conv(ps, rng, "dec" + std::to_string(l) + ".merge", 2 * ch(l), ch(l), 3);
    add_conv(ps, rng, "dec" + std::to_string(l) + ".c1", ch(l), ch(l), 3);
    if (cfg.gated_decoder)
      add_conv(ps, rng, "dec" + std::to_string(l) + ".gate", ch(l), ch(l), 3);
  }
  add_conv(ps, rng, "head", ch(1), 12, 3, /*zero_init=*/true);
  return ps;
}

int64_t restore_param_count(const NetConfig& cfg) {
  const int64_t m = cfg.levels;
  auto ch = [&](int64_t l) { return cfg.restore_base_channels << (l - 1); };
  int64_t total = conv_count(12, ch(1), 3);
  for (int64_t l = 1; l <= m; ++l)
    total += 2 * conv_count(ch(l), ch(l), 3) + conv_count(ch(l), ch(l + 1), 3);
  total += 2 * conv_count(ch(m + 1), ch(m + 1), 3);
  for (int64_t l = 1; l <= m; ++l) {
    total += conv_count(ch(l + 1), ch(l), 3) + conv_count(2 * ch(l), ch(l), 3) +
             conv_count(ch(l), ch(l), 3);
    if (cfg.gated_decoder) total += conv_count(ch(l), ch(l), 3);
  }
  total += conv_count(ch(1), 12, 3);
  return total;
}

RestoreForwardResult restore_forward(const NetConfig& cfg, ParamSet& params,
                                     const Tensor& image, const Tensor& mask) {
  cfg.validate();
  const Shape s = image.shape();
  const int64_t d = cfg.restore_divisor();
  if (s.h % d != 0 || s.w % d != 0)
    throw ShapeError("restore_forward: input " + s.str() + " not divisible by " +
                     std::to_string(d));
  if (cfg.gated_decoder && !mask.defined())
    throw ContractError("restore_forward: gated decoder needs a mask");
  const int64_t m = cfg.levels;

  RestoreForwardResult out;
  Tensor x = pixel_unshuffle(image, 2);
  x = conv_relu(params, "stem", x);
  for (int64_t l = 1; l <= m; ++l) {
    const std::string enc = "enc" + std::to_string(l);
    x = conv_relu(params, enc + ".c1", x);
    x = conv_relu(params, enc + ".c2", x);
    out.taps.push_back({l, x});
    x = conv_relu(params, enc + ".down", x, 2, 1);
  }
  x = conv_relu(params, "bott.c1", x);
  x = conv_relu(params, "bott.c2", x);
  for (int64_t l = m; l >= 1; --l) {
    const std::string dec = "dec" + std::to_string(l);
    x = resize(x, x.shape().h * 2, x.shape().w * 2, ResizeMode::kNearest);
    x = conv_relu(params, dec + ".up", x);
    x = ops::concat_channels(x, out.taps[static_cast<size_t>(l - 1)].feature);
    x = conv_relu(params, dec + ".merge", x);
    x = conv_relu(params, dec + ".c1", x);
    if (cfg.gated_decoder) {
      GateBlockParams gate{conv_at(params, dec + ".gate", 1, 1)};
      x = gated_block(x, mask, gate);
    }
  }
  Tensor corr = conv2d(x, conv_at(params, "head", 1, 1));
  out.restored = ops::add(pixel_shuffle(corr, 2), image);
  return out;
}

}  // namespace mgrs
