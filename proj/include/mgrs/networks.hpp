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

#include "mgrs/layers.hpp"
#include "mgrs/rng.hpp"
#include "mgrs/tensor.hpp"

namespace mgrs {

// Two encoder-decoder networks; the full layer table lives in
// docs/architecture.md. Channel width at encoder level l (1-based) is
// base * 2^(l-1); the bottleneck runs at base * 2^levels.
struct NetConfig {
  int64_t levels = 3;  // encoder levels == distillation breakpoints
  int64_t mask_base_channels = 8;
  int64_t restore_base_channels = 16;
  bool gated_decoder = true;  // restoration decoder only

  void validate() const;
  /// Input dims must divide this (mask net: 2^m; restoration adds one
  /// factor of 2 for the pixel-unshuffle front end).
  int64_t mask_divisor() const { return int64_t{1} << levels; }
  int64_t restore_divisor() const { return int64_t{1} << (levels + 1); }
};

/// Encoder feature captured immediately before the level's stride-2
/// downsampling conv.
struct FeatureTap {
  int64_t level = 0;  // 1-based
  Tensor feature;
};

/// He-normal weights, zero biases, deterministic in rng. The restoration
/// head conv is zero-initialized so the untrained network is the identity.
ParamSet init_mask_network(const NetConfig& cfg, Rng& rng);
ParamSet init_restore_network(const NetConfig& cfg, Rng& rng);

// Closed-form parameter counts for the architecture table.
int64_t mask_param_count(const NetConfig& cfg);
int64_t restore_param_count(const NetConfig& cfg);

// Per-level channel widths of the encoder taps.
int64_t mask_tap_channels(const NetConfig& cfg, int64_t level);
int64_t restore_tap_channels(const NetConfig& cfg, int64_t level);

struct MaskForwardResult {
  Tensor prob_mask;  // (N,1,H,W), sigmoid output in (0,1)
  std::vector<FeatureTap> taps;
};
MaskForwardResult mask_forward(const NetConfig& cfg, ParamSet& params, const Tensor& image);

struct RestoreForwardResult {
  Tensor restored;  // (N,3,H,W), unclamped residual output
  std::vector<FeatureTap> taps;
};
/// mask is the (N,1,h,w) predicted probability mask consumed by the gated
/// decoder blocks (resized per level, treated as constant). Ignored when
/// cfg.gated_decoder is false.
RestoreForwardResult restore_forward(const NetConfig& cfg, ParamSet& params,
                                     const Tensor& image, const Tensor& mask);

}  // namespace mgrs
