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

#include "mgrs/synth.hpp"

#include <algorithm>
#include <cmath>

namespace mgrs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return std::min(std::max(v, 0.0), 1.0); }

double point_segment_dist(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = clamp01(((px - ax) * dx + (py - ay) * dy) / len2);
  const double cx = ax + t * dx;
  const double cy = ay + t * dy;
  return std::hypot(px - cx, py - cy);
}

void check_same_dims(const Image& a, const Image& b, const char* who) {
  if (a.h != b.h || a.w != b.w)
    throw ShapeError(std::string(who) + ": image dimensions differ (" + std::to_string(a.h) +
                     "x" + std::to_string(a.w) + " vs " + std::to_string(b.h) + "x" +
                     std::to_string(b.w) + ")");
}

}  // namespace

MaskImage make_gt_mask(const Image& clean, const Image& degraded, double tau) {
  check_same_dims(clean, degraded, "make_gt_mask");
  if (!(tau > 0.0 && tau < 1.0)) throw ContractError("make_gt_mask: tau must be in (0,1)");
  MaskImage mask(clean.h, clean.w);
  for (int64_t y = 0; y < clean.h; ++y) {
    for (int64_t x = 0; x < clean.w; ++x) {
      double diff = 0.0;
      for (int64_t c = 0; c < 3; ++c) diff += std::abs(clean.at(c, y, x) - degraded.at(c, y, x));
      mask.at(y, x) = (diff / 3.0 > tau) ? 1.0 : 0.0;
    }
  }
  return mask;
}

DegradedPair synth_rain(const Image& clean, const RainParams& p) {
  if (p.streak_count < 0) throw ContractError("synth_rain: streak_count must be >= 0");
  if (p.angle_min_deg > p.angle_max_deg || p.length_min > p.length_max ||
      p.width_min > p.width_max || p.opacity_min > p.opacity_max)
    throw ContractError("synth_rain: empty parameter range");
  if (p.opacity_min <= 0.0 || p.opacity_max > 1.0)
    throw ContractError("synth_rain: opacity must be in (0,1]");
  if (p.length_min <= 0.0 || p.width_min <= 0.0)
    throw ContractError("synth_rain: length and width must be positive");

  const int64_t h = clean.h, w = clean.w;
  std::vector<double> alpha(static_cast<size_t>(h * w), 0.0);
  Rng rng(p.seed);
  for (int64_t s = 0; s < p.streak_count; ++s) {
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double ang = rng.uniform(p.angle_min_deg, p.angle_max_deg) * kPi / 180.0;
    const double len = rng.uniform(p.length_min, p.length_max);
    const double wd = rng.uniform(p.width_min, p.width_max);
    const double op = rng.uniform(p.opacity_min, p.opacity_max);
    // angle 0 is a vertical streak
    const double dx = std::sin(ang), dy = std::cos(ang);
    const double ax = cx - dx * len / 2.0, ay = cy - dy * len / 2.0;
    const double bx = cx + dx * len / 2.0, by = cy + dy * len / 2.0;
    const double reach = wd / 2.0 + 1.0;
    const int64_t y0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ay, by) - reach)));
    const int64_t y1 = std::min<int64_t>(h - 1, static_cast<int64_t>(std::ceil(std::max(ay, by) + reach)));
    const int64_t x0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ax, bx) - reach)));
    const int64_t x1 = std::min<int64_t>(w - 1, static_cast<int64_t>(std::ceil(std::max(ax, bx) + reach)));
    for (int64_t y = y0; y <= y1; ++y) {
      for (int64_t x = x0; x <= x1; ++x) {
        const double d = point_segment_dist(static_cast<double>(x) + 0.5,
                                            static_cast<double>(y) + 0.5, ax, ay, bx, by);
        const double cov = clamp01(wd / 2.0 + 0.5 - d);
        if (cov > 0.0) {
          const double a = cov * op;
          double& cell = alpha[static_cast<size_t>(y * w + x)];
          cell = std::max(cell, a);
        }
      }
    }
  }

  DegradedPair out;
  out.degraded = clean;
  out.mask = MaskImage(h, w);
  for (int64_t y = 0; y < h; ++y) {
    for (int64_t x = 0; x < w; ++x) {
      const double a = alpha[static_cast<size_t>(y * w + x)];
      if (a > 0.0) {
        out.mask.at(y, x) = 1.0;
        for (int64_t c = 0; c < 3; ++c) {
          const double v = out.degraded.at(c, y, x);
          out.degraded.at(c, y, x) = clamp01(v + a * (1.0 - v));
        }
      }
    }
  }
  return out;
}

DegradedPair synth_regional_blur(const Image& clean, const BlurParams& p) {
  const int64_t h = clean.h, w = clean.w;
  if (p.x0 < 0 || p.y0 < 0 || p.x1 > w || p.y1 > h || p.x0 >= p.x1 || p.y0 >= p.y1)
    throw ContractError("synth_regional_blur: region outside image bounds");
  if (p.kernel_length < 1 || p.kernel_length % 2 == 0)
    throw ContractError("synth_regional_blur: kernel_length must be odd and >= 1");

  // Rasterize the 1 px wide motion segment into a k x k kernel.
  const int64_t k = p.kernel_length;
  const double c = static_cast<double>(k - 1) / 2.0;
  const double ang = p.kernel_angle_deg * kPi / 180.0;
  const double dx = std::cos(ang), dy = std::sin(ang);
  const double half = static_cast<double>(k - 1) / 2.0;
  const double ax = c - dx * half, ay = c - dy * half;
  const double bx = c + dx * half, by = c + dy * half;
  std::vector<double> kernel(static_cast<size_t>(k * k), 0.0);
  double total = 0.0;
  for (int64_t ky = 0; ky < k; ++ky) {
    for (int64_t kx = 0; kx < k; ++kx) {
      const double d = point_segment_dist(static_cast<double>(kx), static_cast<double>(ky),
                                          ax, ay, bx, by);
      const double cov = clamp01(1.0 - d);
      kernel[static_cast<size_t>(ky * k + kx)] = cov;
      total += cov;
    }
  }
  for (double& v : kernel) v /= total;

  DegradedPair out;
  out.degraded = clean;
  out.mask = MaskImage(h, w);
  const int64_t r = k / 2;
  for (int64_t y = p.y0; y < p.y1; ++y) {
    for (int64_t x = p.x0; x < p.x1; ++x) {
      out.mask.at(y, x) = 1.0;
      // Linear ramp over 4 px from the region boundary.
      const int64_t dist_in = std::min(std::min(x - p.x0, p.x1 - 1 - x),
                                       std::min(y - p.y0, p.y1 - 1 - y)) + 1;
      const double wgt = std::min(1.0, static_cast<double>(dist_in) / 4.0);
      for (int64_t ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int64_t ky = 0; ky < k; ++ky) {
          const int64_t iy = std::min(std::max<int64_t>(y + ky - r, 0), h - 1);
          for (int64_t kx = 0; kx < k; ++kx) {
            const int64_t ix = std::min(std::max<int64_t>(x + kx - r, 0), w - 1);
            acc += kernel[static_cast<size_t>(ky * k + kx)] * clean.at(ch, iy, ix);
          }
        }
        const double base = clean.at(ch, y, x);
        out.degraded.at(ch, y, x) = clamp01(base + wgt * (acc - base));
      }
    }
  }
  return out;
}

Image gen_clean_image(Rng& rng, int64_t h, int64_t w) {
  if (h < 16 || w < 16) throw ContractError("gen_clean_image: dims must be >= 16");
  Image img(h, w);

  double ca[3], cb[3];
  for (double& v : ca) v = rng.uniform(0.05, 0.95);
  for (double& v : cb) v = rng.uniform(0.05, 0.95);
  const double phi = rng.uniform(0.0, kPi);
  const double nx = std::cos(phi), ny = std::sin(phi);
  const double corners[4] = {0.0, nx * static_cast<double>(w - 1),
                             ny * static_cast<double>(h - 1),
                             nx * static_cast<double>(w - 1) + ny * static_cast<double>(h - 1)};
  const double pmin = std::min(std::min(corners[0], corners[1]), std::min(corners[2], corners[3]));
  const double pmax = std::max(std::max(corners[0], corners[1]), std::max(corners[2], corners[3]));
  const double span = std::max(pmax - pmin, 1e-9);
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x) {
      const double t = (nx * static_cast<double>(x) + ny * static_cast<double>(y) - pmin) / span;
      for (int64_t c = 0; c < 3; ++c) img.at(c, y, x) = ca[c] + t * (cb[c] - ca[c]);
    }

  const int64_t shapes = 4 + rng.next_index(5);
  for (int64_t s = 0; s < shapes; ++s) {
    const bool disc = (rng.next_u64() & 1) != 0;
    double col[3];
    for (double& v : col) v = rng.uniform(0.05, 0.95);
    const double a = rng.uniform(0.5, 1.0);
    if (disc) {
      const double cx = rng.uniform(0.0, static_cast<double>(w));
      const double cy = rng.uniform(0.0, static_cast<double>(h));
      const double rad = rng.uniform(static_cast<double>(std::min(h, w)) / 10.0,
                                     static_cast<double>(std::min(h, w)) / 3.0);
      const int64_t y0 = std::max<int64_t>(0, static_cast<int64_t>(cy - rad) - 1);
      const int64_t y1 = std::min<int64_t>(h - 1, static_cast<int64_t>(cy + rad) + 1);
      const int64_t x0 = std::max<int64_t>(0, static_cast<int64_t>(cx - rad) - 1);
      const int64_t x1 = std::min<int64_t>(w - 1, static_cast<int64_t>(cx + rad) + 1);
      for (int64_t y = y0; y <= y1; ++y)
        for (int64_t x = x0; x <= x1; ++x)
          if (std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy) <= rad)
            for (int64_t c = 0; c < 3; ++c)
              img.at(c, y, x) = img.at(c, y, x) * (1.0 - a) + col[c] * a;
    } else {
      const int64_t rw = 4 + rng.next_index(std::max<int64_t>(1, w / 2));
      const int64_t rh = 4 + rng.next_index(std::max<int64_t>(1, h / 2));
      const int64_t x0 = rng.next_index(std::max<int64_t>(1, w - 3));
      const int64_t y0 = rng.next_index(std::max<int64_t>(1, h - 3));
      const int64_t x1 = std::min(w, x0 + rw);
      const int64_t y1 = std::min(h, y0 + rh);
      for (int64_t y = y0; y < y1; ++y)
        for (int64_t x = x0; x < x1; ++x)
          for (int64_t c = 0; c < 3; ++c)
            img.at(c, y, x) = img.at(c, y, x) * (1.0 - a) + col[c] * a;
    }
  }

  // Mild texture noise, row-major (c, y, x) draw order.
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t y = 0; y < h; ++y)
      for (int64_t x = 0; x < w; ++x)
        img.at(c, y, x) = clamp01(img.at(c, y, x) + rng.uniform(-0.02, 0.02));

  return img;
}

Tensor image_to_tensor(const Image& img) {
  Tensor t({1, 3, img.h, img.w});
  std::copy(img.data.begin(), img.data.end(), t.data());
  return t;
}

Image tensor_to_image(const Tensor& t, int64_t batch) {
  const Shape s = t.shape();
  if (s.c != 3) throw ShapeError("tensor_to_image: expected 3 channels, got " + s.str());
  if (batch < 0 || batch >= s.n) throw ContractError("tensor_to_image: batch index out of range");
  Image img(s.h, s.w);
  const double* p = t.data() + batch * 3 * s.h * s.w;
  std::copy(p, p + 3 * s.h * s.w, img.data.begin());
  return img;
}

Tensor mask_to_tensor(const MaskImage& m) {
  Tensor t({1, 1, m.h, m.w});
  std::copy(m.data.begin(), m.data.end(), t.data());
  return t;
}

MaskImage tensor_to_mask(const Tensor& t, int64_t batch) {
  const Shape s = t.shape();
  if (s.c != 1) throw ShapeError("tensor_to_mask: expected 1 channel, got " + s.str());
  if (batch < 0 || batch >= s.n) throw ContractError("tensor_to_mask: batch index out of range");
  MaskImage m(s.h, s.w);
  const double* p = t.data() + batch * s.h * s.w;
  std::copy(p, p + s.h * s.w, m.data.begin());
  return m;
}

}  // namespace mgrs
