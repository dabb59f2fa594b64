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

#include "mgrs/metrics.hpp"

#include <cmath>

namespace mgrs {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_dims(const Image& a, const Image& b, const char* who) {
  if (a.h != b.h || a.w != b.w)
    throw ContractError(std::string(who) + ": image dimensions differ");
}

// Either the luma plane or one flattened RGB plane set.
std::vector<double> metric_planes(const Image& img, bool on_luminance) {
  if (on_luminance) return luminance(img);
  return img.data;
}

const double* gaussian_window() {
  static const std::vector<double> win = [] {
    std::vector<double> w(kWin * kWin);
    const int r = kWin / 2;
    double sum = 0.0;
    for (int y = 0; y < kWin; ++y)
      for (int x = 0; x < kWin; ++x) {
        const double dy = y - r, dx = x - r;
        const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
        w[y * kWin + x] = v;
        sum += v;
      }
    for (double& v : w) v /= sum;
    return w;
  }();
  return win.data();
}

}  // namespace

std::vector<double> luminance(const Image& img) {
  std::vector<double> y(static_cast<size_t>(img.h * img.w));
  const int64_t plane = img.h * img.w;
  for (int64_t i = 0; i < plane; ++i)
    y[static_cast<size_t>(i)] =
        0.299 * img.data[i] + 0.587 * img.data[plane + i] + 0.114 * img.data[2 * plane + i];
  return y;
}

double psnr(const Image& a, const Image& b, bool on_luminance) {
  check_dims(a, b, "psnr");
  const std::vector<double> pa = metric_planes(a, on_luminance);
  const std::vector<double> pb = metric_planes(b, on_luminance);
  double mse = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pa.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, bool on_luminance) {
  check_dims(a, b, "ssim");
  if (a.h < kWin || a.w < kWin)
    throw ContractError("ssim: images must be at least 11x11");
  const std::vector<double> pa = metric_planes(a, on_luminance);
  const std::vector<double> pb = metric_planes(b, on_luminance);
  const double* win = gaussian_window();
  const double c1 = kK1 * kK1;  // peak 1
  const double c2 = kK2 * kK2;
  const int64_t planes = on_luminance ? 1 : 3;
  const int64_t plane = a.h * a.w;

  double acc = 0.0;
  int64_t count = 0;
  for (int64_t p = 0; p < planes; ++p) {
    const double* xa = pa.data() + p * plane;
    const double* xb = pb.data() + p * plane;
    for (int64_t y = 0; y + kWin <= a.h; ++y) {
      for (int64_t x = 0; x + kWin <= a.w; ++x) {
        double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (int wy = 0; wy < kWin; ++wy) {
          for (int wx = 0; wx < kWin; ++wx) {
            const double wv = win[wy * kWin + wx];
            const double va = xa[(y + wy) * a.w + (x + wx)];
            const double vb = xb[(y + wy) * a.w + (x + wx)];
            mx += wv * va;
            my += wv * vb;
            sxx += wv * va * va;
            syy += wv * vb * vb;
            sxy += wv * (va * vb);  // grouped so the a/b swap rounds identically
          }
        }
        const double vx = sxx - mx * mx;
        const double vy = syy - my * my;
        const double cxy = sxy - mx * my;
        // 2*(mx*my), not (2*mx)*my: keeps ssim(a,b) bit-symmetric.
        acc += ((2.0 * (mx * my) + c1) * (2.0 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    }
  }
  return acc / static_cast<double>(count);
}

double mask_iou(const MaskImage& pred, const MaskImage& gt, double binarize_at) {
  if (pred.h != gt.h || pred.w != gt.w)
    throw ContractError("mask_iou: mask dimensions differ");
  int64_t inter = 0, uni = 0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] >= binarize_at;
    const bool g = gt.data[i] >= binarize_at;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mgrs
