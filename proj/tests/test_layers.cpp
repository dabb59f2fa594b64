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

#include "mgrs/layers.hpp"
#include "oracles.hpp"

using namespace mgrs;

TEST_CASE("conv2d: counting and identity kernels") {
  // all-ones 3x3 input and kernel, pad 1: center 9, corners 4
  Tensor x = Tensor::constant({1, 1, 3, 3}, 1.0);
  ConvParams p{Tensor::constant({1, 1, 3, 3}, 1.0), Tensor::zeros({1, 1, 1, 1}), 1, 1};
  Tensor y = conv2d(x, p);
  CHECK(y.at(0, 0, 1, 1) == 9.0);
  CHECK(y.at(0, 0, 0, 0) == 4.0);
  CHECK(y.at(0, 0, 0, 2) == 4.0);
  CHECK(y.at(0, 0, 2, 0) == 4.0);
  CHECK(y.at(0, 0, 2, 2) == 4.0);

  // delta kernel reproduces the input
  Rng rng(7);
  Tensor img = oracle::random_tensor({1, 1, 5, 7}, rng);
  Tensor delta = Tensor::zeros({1, 1, 3, 3});
  delta.at(0, 0, 1, 1) = 1.0;
  ConvParams pd{delta, Tensor::zeros({1, 1, 1, 1}), 1, 1};
  CHECK(oracle::max_abs_diff(conv2d(img, pd), img) == 0.0);
}

TEST_CASE("conv2d: random case vs nested-loop oracle") {
  Rng rng(11);
  Tensor x = oracle::random_tensor({1, 2, 5, 5}, rng);
  Tensor w = oracle::random_tensor({4, 2, 3, 3}, rng);
  Tensor b = oracle::random_tensor({1, 4, 1, 1}, rng);
  ConvParams p{w, b, 2, 1};
  Tensor got = conv2d(x, p);
  Tensor want = oracle::conv2d(x, w, b, 2, 1);
  CHECK(got.shape() == want.shape());
  CHECK(oracle::max_abs_diff(got, want) < 1e-12);

  // channel mismatch
  Tensor wbad = oracle::random_tensor({4, 3, 3, 3}, rng);
  CHECK_THROWS_AS(conv2d(x, ConvParams{wbad, b, 1, 1}), ShapeError);
}

TEST_CASE("pixel shuffle / unshuffle") {
  Tensor x = Tensor::from_values({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor u = pixel_unshuffle(x, 2);
  CHECK(u.shape() == Shape{1, 4, 1, 1});
  CHECK(u.data()[0] == 1.0);
  CHECK(u.data()[1] == 2.0);
  CHECK(u.data()[2] == 3.0);
  CHECK(u.data()[3] == 4.0);

  Rng rng(13);
  Tensor r = oracle::random_tensor({2, 3, 6, 8}, rng);
  CHECK(oracle::bits_equal(pixel_shuffle(pixel_unshuffle(r, 2), 2), r));

  Tensor c = Tensor::constant({1, 2, 4, 4}, 0.7734);
  Tensor uc = pixel_unshuffle(c, 2);
  for (int64_t i = 0; i < uc.numel(); ++i) CHECK(uc.data()[i] == 0.7734);

  CHECK_THROWS_AS(pixel_unshuffle(oracle::random_tensor({1, 1, 3, 4}, rng), 2), ShapeError);
  CHECK_THROWS_AS(pixel_shuffle(oracle::random_tensor({1, 3, 2, 2}, rng), 2), ShapeError);
}

TEST_CASE("resize: nearest and bilinear") {
  Rng rng(17);
  // nearest x2 duplicates each pixel into a 2x2 block
  Tensor x = oracle::random_tensor({1, 2, 3, 3}, rng);
  Tensor up = resize(x, 6, 6, ResizeMode::kNearest);
  for (int64_t c = 0; c < 2; ++c)
    for (int64_t y = 0; y < 6; ++y)
      for (int64_t xx = 0; xx < 6; ++xx)
        CHECK(up.at(0, c, y, xx) == x.at(0, c, y / 2, xx / 2));

  // bilinear of a constant stays that constant
  Tensor c = Tensor::constant({1, 1, 4, 4}, 0.42);
  Tensor cb = resize(c, 7, 5, ResizeMode::kBilinear);
  for (int64_t i = 0; i < cb.numel(); ++i) CHECK(cb.data()[i] == doctest::Approx(0.42).epsilon(1e-15));

  // align-corners 2x2 -> 3x3 of [[0,1],[2,3]]: corners preserved, center 1.5
  Tensor q = Tensor::from_values({1, 1, 2, 2}, {0, 1, 2, 3});
  Tensor qb = resize(q, 3, 3, ResizeMode::kBilinear);
  CHECK(qb.at(0, 0, 0, 0) == 0.0);
  CHECK(qb.at(0, 0, 0, 2) == 1.0);
  CHECK(qb.at(0, 0, 2, 0) == 2.0);
  CHECK(qb.at(0, 0, 2, 2) == 3.0);
  CHECK(qb.at(0, 0, 1, 1) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("activations") {
  Tensor x = Tensor::from_values({1, 1, 1, 2}, {-1.0, 2.0});
  Tensor r = ops::relu(x);
  CHECK(r.data()[0] == 0.0);
  CHECK(r.data()[1] == 2.0);

  CHECK(ops::sigmoid(Tensor::zeros({1, 1, 1, 1})).item() == 0.5);

  Tensor z = Tensor::zeros({1, 4, 2, 2});
  Tensor sm = ops::softmax_channels(z);
  for (int64_t i = 0; i < sm.numel(); ++i) CHECK(sm.data()[i] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("softmax_channels: simplex property on random inputs") {
  Rng rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    Tensor x = oracle::random_tensor({2, 5, 3, 3}, rng, -8.0, 8.0);
    Tensor sm = ops::softmax_channels(x);
    const Shape s = sm.shape();
    for (int64_t n = 0; n < s.n; ++n)
      for (int64_t y = 0; y < s.h; ++y)
        for (int64_t xx = 0; xx < s.w; ++xx) {
          double sum = 0.0;
          for (int64_t c = 0; c < s.c; ++c) {
            CHECK(sm.at(n, c, y, xx) >= 0.0);
            sum += sm.at(n, c, y, xx);
          }
          CHECK(std::abs(sum - 1.0) < 1e-12);
        }
  }
}

TEST_CASE("global_avg_pool") {
  Tensor c = Tensor::constant({2, 3, 4, 4}, 0.31);
  Tensor g = global_avg_pool(c);
  CHECK(g.shape() == Shape{2, 3, 1, 1});
  for (int64_t i = 0; i < g.numel(); ++i) CHECK(g.data()[i] == doctest::Approx(0.31).epsilon(1e-15));

  Rng rng(23);
  Tensor x = oracle::random_tensor({2, 3, 4, 4}, rng);
  CHECK(oracle::max_abs_diff(global_avg_pool(x), oracle::mean_spatial(x)) < 1e-12);
}

TEST_CASE("gated_block") {
  Rng rng(29);
  Tensor f = oracle::random_tensor({1, 3, 4, 4}, rng);
  GateBlockParams p{ConvParams{oracle::random_tensor({3, 3, 3, 3}, rng),
                               oracle::random_tensor({1, 3, 1, 1}, rng), 1, 1}};

  // closed gate: exact identity
  Tensor zero_mask = Tensor::zeros({1, 1, 4, 4});
  Tensor closed = gated_block(f, zero_mask, p);
  for (int64_t i = 0; i < f.numel(); ++i) CHECK(closed.data()[i] == f.data()[i]);

  // open gate: f + conv(f) exactly
  Tensor one_mask = Tensor::constant({1, 1, 4, 4}, 1.0);
  Tensor open = gated_block(f, one_mask, p);
  Tensor conv_out = conv2d(f, p.conv);
  for (int64_t i = 0; i < f.numel(); ++i)
    CHECK(open.data()[i] == f.data()[i] + conv_out.data()[i]);

  // random mask vs composed oracle f + conv*M
  Tensor m = oracle::random_tensor({1, 1, 4, 4}, rng, 0.0, 1.0);
  Tensor got = gated_block(f, m, p);
  Tensor want = oracle::elementwise(
      oracle::conv2d(f, p.conv.weight, p.conv.bias, 1, 1), m,
      [](double a, double b) { return a * b; });
  for (int64_t i = 0; i < f.numel(); ++i)
    CHECK(std::abs(got.data()[i] - (f.data()[i] + want.data()[i])) < 1e-12);

  // affine in a scalar gate value
  Tensor m0 = Tensor::constant({1, 1, 4, 4}, 0.0);
  Tensor m1 = Tensor::constant({1, 1, 4, 4}, 1.0);
  Tensor mh = Tensor::constant({1, 1, 4, 4}, 0.5);
  Tensor y0 = gated_block(f, m0, p);
  Tensor y1 = gated_block(f, m1, p);
  Tensor yh = gated_block(f, mh, p);
  for (int64_t i = 0; i < f.numel(); ++i)
    CHECK(std::abs(yh.data()[i] - 0.5 * (y0.data()[i] + y1.data()[i])) < 1e-12);

  // out-of-range mask is a contract error
  Tensor bad = Tensor::constant({1, 1, 4, 4}, 1.5);
  CHECK_THROWS_AS(gated_block(f, bad, p), ContractError);
  // tiny fuzz is clamped, not an error
  Tensor fuzz = Tensor::constant({1, 1, 4, 4}, 1.0 + 5e-10);
  CHECK_NOTHROW(gated_block(f, fuzz, p));

  // mask is resized internally when smaller
  Tensor small = oracle::random_tensor({1, 1, 2, 2}, rng, 0.0, 1.0);
  CHECK_NOTHROW(gated_block(f, small, p));
}
