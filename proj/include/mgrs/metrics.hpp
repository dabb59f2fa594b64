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

#include "mgrs/synth.hpp"

namespace mgrs {

/// BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B.
std::vector<double> luminance(const Image& img);

/// 10*log10(1/MSE) with peak 1, capped at 100 dB (identical images hit the
/// cap). on_luminance computes the MSE on the BT.601 luma plane.
double psnr(const Image& a, const Image& b, bool on_luminance = true);

/// Classic SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
/// peak 1, averaged over valid (fully inside) window positions only.
/// Dims must be >= 11.
double ssim(const Image& a, const Image& b, bool on_luminance = true);

/// Intersection over union of the binarized masks; 1.0 when both are empty.
double mask_iou(const MaskImage& pred, const MaskImage& gt, double binarize_at = 0.5);

}  // namespace mgrs
