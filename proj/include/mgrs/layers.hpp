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

#include "mgrs/tensor.hpp"

namespace mgrs {

/// 2-D convolution parameters. weight is (C_out, C_in, k, k), bias is
/// (1, C_out, 1, 1). Cross-correlation convention: no kernel flip.
struct ConvParams {
  Tensor weight;
  Tensor bias;
  int64_t stride = 1;
  int64_t pad = 0;
};

/// Output extent: floor((H + 2*pad - k) / stride) + 1, same for W.
Tensor conv2d(const Tensor& x, const ConvParams& p);

/// Space-to-depth by factor r. Within each source channel the r*r output
/// channels are ordered by source offset (dy, dx) row-major:
/// out[n][c*r*r + dy*r + dx][y][x] = in[n][c][y*r + dy][x*r + dx].
Tensor pixel_unshuffle(const Tensor& x, int64_t r = 2);
/// Exact inverse of pixel_unshuffle.
Tensor pixel_shuffle(const Tensor& x, int64_t r = 2);

enum class ResizeMode { kNearest, kBilinear };

/// Nearest maps output pixel y to source floor(y*H/H') (an x2 upscale
/// duplicates each pixel into a 2x2 block). Bilinear uses the
/// align-corners-true convention: corners map to corners. Both modes are
/// differentiable; bilinear is smooth.
Tensor resize(const Tensor& x, int64_t out_h, int64_t out_w, ResizeMode mode);

/// Per-channel spatial mean, (N,C,H,W) -> (N,C,1,1).
Tensor global_avg_pool(const Tensor& x);

/// Mask-guided gate: a same-size convolution with equal input/output
/// channels, applied on a residual branch.
struct GateBlockParams {
  ConvParams conv;
};

/// f + conv(f) * M, with M resized bilinearly to f's spatial size and
/// broadcast over channels. M must lie in [0,1] (tolerance 1e-9) and is
/// treated as a constant: no gradient flows into it.
Tensor gated_block(const Tensor& f, const Tensor& mask, const GateBlockParams& p);

}  // namespace mgrs
