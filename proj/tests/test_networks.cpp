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

#include "mgrs/networks.hpp"
#include "mgrs/synth.hpp"
#include "oracles.hpp"

using namespace mgrs;

namespace {

NetConfig desk_cfg() { return NetConfig{}; }

NetConfig tiny_cfg() {
  NetConfig cfg;
  cfg.levels = 2;
  cfg.mask_base_channels = 4;
  cfg.restore_base_channels = 4;
  return cfg;
}

}  // namespace

TEST_CASE("init determinism and parameter-count formulas") {
  const NetConfig cfg = desk_cfg();
  Rng a(3), b(3);
  ParamSet pa = init_mask_network(cfg, a);
  ParamSet pb = init_mask_network(cfg, b);
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa.name(i) == pb.name(i));
    CHECK(oracle::bits_equal(pa.tensor(i), pb.tensor(i)));
  }

  CHECK(pa.total_elements() == mask_param_count(cfg));
  Rng c(4);
  ParamSet pr = init_restore_network(cfg, c);
  CHECK(pr.total_elements() == restore_param_count(cfg));

  // lightweight contract: mask net under 20% of the restoration net
  CHECK(static_cast<double>(mask_param_count(cfg)) <
        0.2 * static_cast<double>(restore_param_count(cfg)));
}

TEST_CASE("mask_forward contracts") {
  const NetConfig cfg = tiny_cfg();
  Rng rng(5);
  ParamSet params = init_mask_network(cfg, rng);
  Rng drng(6);
  Tensor x = Tensor::uniform({2, 3, 16, 16}, drng, 0.0, 1.0);
  MaskForwardResult out = mask_forward(cfg, params, x);

  CHECK(out.prob_mask.shape() == Shape{2, 1, 16, 16});
  for (int64_t i = 0; i < out.prob_mask.numel(); ++i) {
    CHECK(out.prob_mask.data()[i] > 0.0);
    CHECK(out.prob_mask.data()[i] < 1.0);
  }
  REQUIRE(out.taps.size() == 2);
  CHECK(out.taps[0].level == 1);
  CHECK(out.taps[0].feature.shape() == Shape{2, 4, 16, 16});
  CHECK(out.taps[1].feature.shape() == Shape{2, 8, 8, 8});

  Tensor bad = Tensor::zeros({1, 3, 10, 16});
  CHECK_THROWS_AS(mask_forward(cfg, params, bad), ShapeError);
}

TEST_CASE("restore_forward: shape, taps, identity at init") {
  const NetConfig cfg = tiny_cfg();
  Rng rng(7);
  ParamSet params = init_restore_network(cfg, rng);
  Rng drng(8);
  Tensor img = Tensor::uniform({1, 3, 16, 16}, drng, 0.0, 1.0);
  Tensor mask = Tensor::uniform({1, 1, 16, 16}, drng, 0.0, 1.0);

  RestoreForwardResult out = restore_forward(cfg, params, img, mask);
  CHECK(out.restored.shape() == img.shape());
  REQUIRE(out.taps.size() == 2);
  // working resolution is halved by the pixel-unshuffle front end
  CHECK(out.taps[0].feature.shape() == Shape{1, 4, 8, 8});
  CHECK(out.taps[1].feature.shape() == Shape{1, 8, 4, 4});

  // zero-initialized head: the untrained network is the identity
  CHECK(oracle::bits_equal(out.restored, img));

  CHECK_THROWS_AS(restore_forward(cfg, params, Tensor::zeros({1, 3, 12, 16}), mask),
                  ShapeError);
  CHECK_THROWS_AS(restore_forward(cfg, params, img, Tensor()), ContractError);
}

TEST_CASE("forward is a deterministic function of params and inputs") {
  const NetConfig cfg = tiny_cfg();
  Rng rng(9);
  ParamSet params = init_restore_network(cfg, rng);
  Rng drng(10);
  Tensor img = Tensor::uniform({1, 3, 16, 16}, drng, 0.0, 1.0);
  Tensor mask = Tensor::uniform({1, 1, 16, 16}, drng, 0.0, 1.0);
  Tensor r1 = restore_forward(cfg, params, img, mask).restored;
  Tensor r2 = restore_forward(cfg, params, img, mask).restored;
  CHECK(oracle::bits_equal(r1, r2));
}

TEST_CASE("mask == 0 makes the gated decoder inert") {
  // With a zero mask the gated net equals the same net with gated blocks
  // removed (shared weights, gate convs dropped).
  NetConfig gated = tiny_cfg();
  gated.gated_decoder = true;
  NetConfig plain = tiny_cfg();
  plain.gated_decoder = false;

  Rng rng(11);
  ParamSet gated_params = init_restore_network(gated, rng);
  // Give the head real weights so outputs differ from the input.
  Rng hr(12);
  Tensor& head = gated_params.get("head.w");
  for (int64_t i = 0; i < head.numel(); ++i) head.data()[i] = hr.uniform(-0.1, 0.1);

  Rng rng2(13);
  ParamSet plain_params = init_restore_network(plain, rng2);
  for (size_t i = 0; i < plain_params.size(); ++i) {
    const std::string& name = plain_params.name(i);
    Tensor& dst = plain_params.get(name);
    const Tensor& src = gated_params.get(name);
    std::copy(src.data(), src.data() + src.numel(), dst.data());
  }

  Rng drng(14);
  Tensor img = Tensor::uniform({1, 3, 16, 16}, drng, 0.0, 1.0);
  Tensor zero_mask = Tensor::zeros({1, 1, 16, 16});
  Tensor with_gates = restore_forward(gated, gated_params, img, zero_mask).restored;
  Tensor without = restore_forward(plain, plain_params, img, zero_mask).restored;
  CHECK(oracle::bits_equal(with_gates, without));
}

TEST_CASE("tap spatial sizes follow the halving law at desk scale") {
  const NetConfig cfg = desk_cfg();
  Rng rng(15);
  ParamSet mask_params = init_mask_network(cfg, rng);
  Tensor x = Tensor::uniform({1, 3, 64, 64}, rng, 0.0, 1.0);
  MaskForwardResult out = mask_forward(cfg, mask_params, x);
  REQUIRE(out.taps.size() == 3);
  for (int64_t l = 1; l <= 3; ++l) {
    const Shape s = out.taps[static_cast<size_t>(l - 1)].feature.shape();
    CHECK(s.h == 64 >> (l - 1));
    CHECK(s.w == 64 >> (l - 1));
    CHECK(s.c == mask_tap_channels(cfg, l));
  }
}
