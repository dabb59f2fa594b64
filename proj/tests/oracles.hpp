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

// Brute-force reference implementations used as test oracles. Everything
// here is written directly from the mathematical definitions and stays
// independent of the library's kernels and tape.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "mgrs/synth.hpp"
#include "mgrs/tensor.hpp"

namespace oracle {

using mgrs::Image;
using mgrs::Shape;
using mgrs::Tensor;

inline double at(const Tensor& t, int64_t n, int64_t c, int64_t y, int64_t x) {
  const Shape s = t.shape();
  return t.data()[((n * s.c + c) * s.h + y) * s.w + x];
}

/// Cross-correlation with zero padding, straight from the definition.
inline Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int64_t stride,
                     int64_t pad) {
  const Shape xs = x.shape();
  const Shape ws = w.shape();
  const int64_t k = ws.h;
  const int64_t oh = (xs.h + 2 * pad - k) / stride + 1;
  const int64_t ow = (xs.w + 2 * pad - k) / stride + 1;
  Tensor out({xs.n, ws.n, oh, ow});
  for (int64_t n = 0; n < xs.n; ++n)
    for (int64_t co = 0; co < ws.n; ++co)
      for (int64_t oy = 0; oy < oh; ++oy)
        for (int64_t ox = 0; ox < ow; ++ox) {
          double acc = bias.defined() ? bias.data()[co] : 0.0;
          for (int64_t ci = 0; ci < xs.c; ++ci)
            for (int64_t ky = 0; ky < k; ++ky)
              for (int64_t kx = 0; kx < k; ++kx) {
                const int64_t iy = oy * stride - pad + ky;
                const int64_t ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= xs.h || ix < 0 || ix >= xs.w) continue;
                acc += at(w, co, ci, ky, kx) * at(x, n, ci, iy, ix);
              }
          out.at(n, co, oy, ox) = acc;
        }
  return out;
}

/// Elementwise binary op with b broadcast over size-1 dims.
template <typename Fn>
inline Tensor elementwise(const Tensor& a, const Tensor& b, Fn&& fn) {
  const Shape as = a.shape();
  const Shape bs = b.shape();
  Tensor out(as);
  for (int64_t n = 0; n < as.n; ++n)
    for (int64_t c = 0; c < as.c; ++c)
      for (int64_t y = 0; y < as.h; ++y)
        for (int64_t x = 0; x < as.w; ++x)
          out.at(n, c, y, x) =
              fn(at(a, n, c, y, x), at(b, bs.n == 1 ? 0 : n, bs.c == 1 ? 0 : c,
                                       bs.h == 1 ? 0 : y, bs.w == 1 ? 0 : x));
  return out;
}

inline double sum_all(const Tensor& a) {
  double acc = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) acc += a.data()[i];
  return acc;
}

inline double mean_all(const Tensor& a) { return sum_all(a) / static_cast<double>(a.numel()); }

inline Tensor mean_spatial(const Tensor& a) {
  const Shape s = a.shape();
  Tensor out({s.n, s.c, 1, 1});
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c) {
      double acc = 0.0;
      for (int64_t y = 0; y < s.h; ++y)
        for (int64_t x = 0; x < s.w; ++x) acc += at(a, n, c, y, x);
      out.at(n, c, 0, 0) = acc / static_cast<double>(s.h * s.w);
    }
  return out;
}

/// sum_c rho_c * ||(a-b)_c||^2 / (N*H*W), triple loop.
inline double weighted_sse(const Tensor& a, const Tensor& b, const std::vector<double>& rho) {
  const Shape s = a.shape();
  double total = 0.0;
  for (int64_t c = 0; c < s.c; ++c) {
    double sse = 0.0;
    for (int64_t n = 0; n < s.n; ++n)
      for (int64_t y = 0; y < s.h; ++y)
        for (int64_t x = 0; x < s.w; ++x) {
          const double d = at(a, n, c, y, x) - at(b, n, c, y, x);
          sse += d * d;
        }
    total += rho[static_cast<size_t>(c)] * sse;
  }
  return total / static_cast<double>(s.n * s.h * s.w);
}

/// Align-corners bilinear resize, direct transcription of the formula.
inline Tensor bilinear_resize(const Tensor& x, int64_t oh, int64_t ow) {
  const Shape s = x.shape();
  Tensor out({s.n, s.c, oh, ow});
  const double sy = oh > 1 ? static_cast<double>(s.h - 1) / static_cast<double>(oh - 1) : 0.0;
  const double sx = ow > 1 ? static_cast<double>(s.w - 1) / static_cast<double>(ow - 1) : 0.0;
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c)
      for (int64_t y = 0; y < oh; ++y)
        for (int64_t xx = 0; xx < ow; ++xx) {
          const double fy = y * sy;
          const double fx = xx * sx;
          const int64_t y0 = std::min(static_cast<int64_t>(std::floor(fy)), s.h - 1);
          const int64_t x0 = std::min(static_cast<int64_t>(std::floor(fx)), s.w - 1);
          const int64_t y1 = std::min(y0 + 1, s.h - 1);
          const int64_t x1 = std::min(x0 + 1, s.w - 1);
          const double dy = fy - y0, dx = fx - x0;
          out.at(n, c, y, xx) = (1 - dy) * (1 - dx) * at(x, n, c, y0, x0) +
                                (1 - dy) * dx * at(x, n, c, y0, x1) +
                                dy * (1 - dx) * at(x, n, c, y1, x0) +
                                dy * dx * at(x, n, c, y1, x1);
        }
  return out;
}

/// GAP -> affine -> relu -> affine on 1x1-conv weights; one row per sample.
inline std::vector<std::vector<double>> pooled_mlp(const Tensor& input, const Tensor& w1,
                                                   const Tensor& b1, const Tensor& w2,
                                                   const Tensor& b2) {
  const Shape s = input.shape();
  const int64_t hid = w1.shape().n;
  const int64_t outc = w2.shape().n;
  std::vector<std::vector<double>> rows;
  for (int64_t n = 0; n < s.n; ++n) {
    std::vector<double> pooled(static_cast<size_t>(s.c), 0.0);
    for (int64_t c = 0; c < s.c; ++c) {
      double acc = 0.0;
      for (int64_t y = 0; y < s.h; ++y)
        for (int64_t x = 0; x < s.w; ++x) acc += at(input, n, c, y, x);
      pooled[static_cast<size_t>(c)] = acc / static_cast<double>(s.h * s.w);
    }
    std::vector<double> h(static_cast<size_t>(hid), 0.0);
    for (int64_t o = 0; o < hid; ++o) {
      double acc = b1.data()[o];
      for (int64_t c = 0; c < s.c; ++c) acc += at(w1, o, c, 0, 0) * pooled[static_cast<size_t>(c)];
      h[static_cast<size_t>(o)] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> out(static_cast<size_t>(outc), 0.0);
    for (int64_t o = 0; o < outc; ++o) {
      double acc = b2.data()[o];
      for (int64_t c = 0; c < hid; ++c) acc += at(w2, o, c, 0, 0) * h[static_cast<size_t>(c)];
      out[static_cast<size_t>(o)] = acc;
    }
    rows.push_back(std::move(out));
  }
  return rows;
}

inline std::vector<double> softmax_vec(const std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double z = 0.0;
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return out;
}

inline double l1(const Tensor& a, const Tensor& b) {
  double acc = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) acc += std::abs(a.data()[i] - b.data()[i]);
  return acc / static_cast<double>(a.numel());
}

inline double bce(const Tensor& p, const Tensor& t) {
  double acc = 0.0;
  for (int64_t i = 0; i < p.numel(); ++i) {
    const double q = std::min(std::max(p.data()[i], 1e-7), 1.0 - 1e-7);
    acc -= t.data()[i] * std::log(q) + (1.0 - t.data()[i]) * std::log(1.0 - q);
  }
  return acc / static_cast<double>(p.numel());
}

/// Ten Adam recurrences on one scalar, straight from the update equations.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int64_t t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  double step(double theta, double g, double lr) {
    t += 1;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
    return theta - lr * mhat / (std::sqrt(vhat) + eps);
  }
};

inline double psnr_lum(const Image& a, const Image& b) {
  const int64_t plane = a.h * a.w;
  double mse = 0.0;
  for (int64_t i = 0; i < plane; ++i) {
    const double ya = 0.299 * a.data[i] + 0.587 * a.data[plane + i] + 0.114 * a.data[2 * plane + i];
    const double yb = 0.299 * b.data[i] + 0.587 * b.data[plane + i] + 0.114 * b.data[2 * plane + i];
    mse += (ya - yb) * (ya - yb);
  }
  mse /= static_cast<double>(plane);
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

/// SSIM over valid 11x11 windows on the luma plane, direct windowed formula.
inline double ssim_lum(const Image& a, const Image& b) {
  const int64_t plane = a.h * a.w;
  std::vector<double> ya(plane), yb(plane);
  for (int64_t i = 0; i < plane; ++i) {
    ya[i] = 0.299 * a.data[i] + 0.587 * a.data[plane + i] + 0.114 * a.data[2 * plane + i];
    yb[i] = 0.299 * b.data[i] + 0.587 * b.data[plane + i] + 0.114 * b.data[2 * plane + i];
  }
  const int W = 11;
  const double sigma = 1.5;
  std::vector<double> win(W * W);
  double wsum = 0.0;
  for (int y = 0; y < W; ++y)
    for (int x = 0; x < W; ++x) {
      const double dy = y - W / 2, dx = x - W / 2;
      win[y * W + x] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      wsum += win[y * W + x];
    }
  for (double& v : win) v /= wsum;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double acc = 0.0;
  int64_t count = 0;
  for (int64_t oy = 0; oy + W <= a.h; ++oy)
    for (int64_t ox = 0; ox + W <= a.w; ++ox) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int y = 0; y < W; ++y)
        for (int x = 0; x < W; ++x) {
          const double wv = win[y * W + x];
          const double va = ya[(oy + y) * a.w + ox + x];
          const double vb = yb[(oy + y) * a.w + ox + x];
          mx += wv * va;
          my += wv * vb;
          xx += wv * va * va;
          yy += wv * vb * vb;
          xy += wv * va * vb;
        }
      acc += ((2 * mx * my + c1) * (2 * (xy - mx * my) + c2)) /
             ((mx * mx + my * my + c1) * ((xx - mx * mx) + (yy - my * my) + c2));
      ++count;
    }
  return acc / static_cast<double>(count);
}

// Test helpers.

inline Tensor random_tensor(const Shape& s, mgrs::Rng& rng, double lo = -1.0, double hi = 1.0) {
  return Tensor::uniform(s, rng, lo, hi);
}

inline bool bits_equal(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) return false;
  for (int64_t i = 0; i < a.numel(); ++i) {
    if (std::memcmp(&a.data()[i], &b.data()[i], sizeof(double)) != 0) return false;
  }
  return true;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace oracle
