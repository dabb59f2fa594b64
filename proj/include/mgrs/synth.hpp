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

#include <cstdint>
#include <vector>

#include "mgrs/rng.hpp"
#include "mgrs/tensor.hpp"

namespace mgrs {

/// RGB image, planar channel layout (3, H, W), values in [0, 1].
struct Image {
  int64_t h = 0;
  int64_t w = 0;
  std::vector<double> data;

  Image() = default;
  Image(int64_t height, int64_t width)
      : h(height), w(width), data(static_cast<size_t>(3 * height * width), 0.0) {}

  double at(int64_t c, int64_t y, int64_t x) const { return data[(c * h + y) * w + x]; }
  double& at(int64_t c, int64_t y, int64_t x) { return data[(c * h + y) * w + x]; }
};

/// Single-channel degradation mask. Ground-truth masks are exactly {0,1};
/// predicted masks are probabilities in (0,1).
struct MaskImage {
  int64_t h = 0;
  int64_t w = 0;
  std::vector<double> data;

  MaskImage() = default;
  MaskImage(int64_t height, int64_t width)
      : h(height), w(width), data(static_cast<size_t>(height * width), 0.0) {}

  double at(int64_t y, int64_t x) const { return data[y * w + x]; }
  double& at(int64_t y, int64_t x) { return data[y * w + x]; }
};

/// mask(y,x) = 1 iff the RGB-mean absolute difference exceeds tau.
MaskImage make_gt_mask(const Image& clean, const Image& degraded, double tau);

struct RainParams {
  int64_t streak_count = 14;
  double angle_min_deg = -25.0;
  double angle_max_deg = 25.0;
  double length_min = 10.0;
  double length_max = 22.0;
  double width_min = 1.4;
  double width_max = 2.8;
  double opacity_min = 0.55;
  double opacity_max = 0.95;
  uint64_t seed = 0;
};

struct DegradedPair {
  Image degraded;
  MaskImage mask;
};

/// Anti-aliased white streaks, screen-blended onto the image. The returned
/// mask is the exact rasterized streak support. Pure function of
/// (clean, params).
DegradedPair synth_rain(const Image& clean, const RainParams& p);

struct BlurParams {
  // Half-open region box [x0,x1) x [y0,y1); must lie inside the image.
  int64_t x0 = 0;
  int64_t y0 = 0;
  int64_t x1 = 0;
  int64_t y1 = 0;
  int64_t kernel_length = 9;  // odd; 1 is the delta kernel
  double kernel_angle_deg = 0.0;
  uint64_t seed = 0;
};

/// Linear motion blur applied inside the region, blended to the untouched
/// outside over a 4 px linear ramp. mask = region support.
DegradedPair synth_regional_blur(const Image& clean, const BlurParams& p);

/// Procedural clean image: a color gradient, random rectangles and discs,
/// and mild texture noise. Deterministic per rng state; dims must be >= 16.
Image gen_clean_image(Rng& rng, int64_t h, int64_t w);

// Tensor bridges. Batch index selects the slice for tensor->image.
Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const Tensor& t, int64_t batch = 0);
Tensor mask_to_tensor(const MaskImage& m);
MaskImage tensor_to_mask(const Tensor& t, int64_t batch = 0);

}  // namespace mgrs
