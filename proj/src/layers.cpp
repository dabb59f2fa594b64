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

#include "mgrs/layers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mgrs/kernels.hpp"

namespace mgrs {

Tensor make_op_output(const Shape& s, bool track);

namespace {

bool tracking(const Tensor& a) { return Tape::active() && a.requires_grad(); }

kernels::ConvGeom conv_geom(const Tensor& x, const ConvParams& p) {
  const Shape xs = x.shape();
  const Shape ws = p.weight.shape();
  if (ws.h != ws.w) throw ShapeError("conv2d: kernel must be square, got " + ws.str());
  if (xs.c != ws.c)
    throw ShapeError("conv2d: input has " + std::to_string(xs.c) + " channels, weight expects " +
                     std::to_string(ws.c));
  if (p.bias.defined() && !(p.bias.shape() == Shape{1, ws.n, 1, 1}))
    throw ShapeError("conv2d: bias shape " + p.bias.shape().str() + " != (1," +
                     std::to_string(ws.n) + ",1,1)");
  if (p.stride < 1) throw ContractError("conv2d: stride must be >= 1");
  if (p.pad < 0) throw ContractError("conv2d: pad must be >= 0");
  const int64_t k = ws.h;
  if (xs.h + 2 * p.pad < k || xs.w + 2 * p.pad < k)
    throw ContractError("conv2d: kernel larger than padded input");
  kernels::ConvGeom g;
  g.n = xs.n;
  g.cin = xs.c;
  g.h = xs.h;
  g.w = xs.w;
  g.cout = ws.n;
  g.k = k;
  g.stride = p.stride;
  g.pad = p.pad;
  g.oh = (xs.h + 2 * p.pad - k) / p.stride + 1;
  g.ow = (xs.w + 2 * p.pad - k) / p.stride + 1;
  return g;
}

}  // namespace

Tensor conv2d(const Tensor& x, const ConvParams& p) {
  const kernels::ConvGeom g = conv_geom(x, p);
  const bool track = Tape::active() && (x.requires_grad() || p.weight.requires_grad() ||
                                        (p.bias.defined() && p.bias.requires_grad()));
  Tensor out = make_op_output({g.n, g.cout, g.oh, g.ow}, track);
  kernels::active().conv2d_fwd(g, x.data(), p.weight.data(),
                               p.bias.defined() ? p.bias.data() : nullptr, out.data());
  if (track) {
    Tensor xc = x, wc = p.weight, bc = p.bias, oc = out;
    Tape::active()->record("conv2d", out, [g, xc, wc, bc, oc]() mutable {
      const double* gout = oc.grad();
      if (xc.requires_grad()) kernels::conv2d_bwd_input(g, wc.data(), gout, xc.grad());
      const bool need_w = wc.requires_grad();
      const bool need_b = bc.defined() && bc.requires_grad();
      if (need_w || need_b) {
        std::vector<double> discard_w, discard_b;
        double* gw = wc.grad();
        double* gb = nullptr;
        if (!need_w) {
          discard_w.assign(static_cast<size_t>(wc.numel()), 0.0);
          gw = discard_w.data();
        }
        if (need_b) {
          gb = bc.grad();
        } else {
          discard_b.assign(static_cast<size_t>(g.cout), 0.0);
          gb = discard_b.data();
        }
        std::vector<double> patch(static_cast<size_t>(g.cin * g.k * g.k));
        kernels::active().conv2d_bwd_weight(g, xc.data(), gout, gw, gb, patch.data());
      }
    });
  }
  return out;
}

Tensor pixel_unshuffle(const Tensor& x, int64_t r) {
  const Shape s = x.shape();
  if (r < 1) throw ContractError("pixel_unshuffle: r must be >= 1");
  if (s.h % r != 0 || s.w % r != 0)
    throw ShapeError("pixel_unshuffle: spatial dims " + s.str() + " not divisible by " +
                     std::to_string(r));
  const bool track = tracking(x);
  const Shape os{s.n, s.c * r * r, s.h / r, s.w / r};
  Tensor out = make_op_output(os, track);
  const double* px = x.data();
  double* po = out.data();
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c)
      for (int64_t dy = 0; dy < r; ++dy)
        for (int64_t dx = 0; dx < r; ++dx) {
          const int64_t oc = c * r * r + dy * r + dx;
          for (int64_t y = 0; y < os.h; ++y)
            for (int64_t xw = 0; xw < os.w; ++xw)
              po[((n * os.c + oc) * os.h + y) * os.w + xw] =
                  px[((n * s.c + c) * s.h + y * r + dy) * s.w + xw * r + dx];
        }
  if (track) {
    Tensor xc = x, oc2 = out;
    Tape::active()->record("pixel_unshuffle", out, [r, xc, oc2]() mutable {
      const Shape s = xc.shape();
      const Shape os = oc2.shape();
      double* gx = xc.grad();
      const double* g = oc2.grad();
      for (int64_t n = 0; n < s.n; ++n)
        for (int64_t c = 0; c < s.c; ++c)
          for (int64_t dy = 0; dy < r; ++dy)
            for (int64_t dx = 0; dx < r; ++dx) {
              const int64_t oc = c * r * r + dy * r + dx;
              for (int64_t y = 0; y < os.h; ++y)
                for (int64_t xw = 0; xw < os.w; ++xw)
                  gx[((n * s.c + c) * s.h + y * r + dy) * s.w + xw * r + dx] +=
                      g[((n * os.c + oc) * os.h + y) * os.w + xw];
            }
    });
  }
  return out;
}

Tensor pixel_shuffle(const Tensor& x, int64_t r) {
  const Shape s = x.shape();
  if (r < 1) throw ContractError("pixel_shuffle: r must be >= 1");
  if (s.c % (r * r) != 0)
    throw ShapeError("pixel_shuffle: channels " + std::to_string(s.c) + " not divisible by " +
                     std::to_string(r * r));
  const bool track = tracking(x);
  const Shape os{s.n, s.c / (r * r), s.h * r, s.w * r};
  Tensor out = make_op_output(os, track);
  const double* px = x.data();
  double* po = out.data();
  for (int64_t n = 0; n < os.n; ++n)
    for (int64_t c = 0; c < os.c; ++c)
      for (int64_t dy = 0; dy < r; ++dy)
        for (int64_t dx = 0; dx < r; ++dx) {
          const int64_t ic = c * r * r + dy * r + dx;
          for (int64_t y = 0; y < s.h; ++y)
            for (int64_t xw = 0; xw < s.w; ++xw)
              po[((n * os.c + c) * os.h + y * r + dy) * os.w + xw * r + dx] =
                  px[((n * s.c + ic) * s.h + y) * s.w + xw];
        }
  if (track) {
    Tensor xc = x, oc2 = out;
    Tape::active()->record("pixel_shuffle", out, [r, xc, oc2]() mutable {
      const Shape s = xc.shape();
      const Shape os = oc2.shape();
      double* gx = xc.grad();
      const double* g = oc2.grad();
      for (int64_t n = 0; n < os.n; ++n)
        for (int64_t c = 0; c < os.c; ++c)
          for (int64_t dy = 0; dy < r; ++dy)
            for (int64_t dx = 0; dx < r; ++dx) {
              const int64_t ic = c * r * r + dy * r + dx;
              for (int64_t y = 0; y < s.h; ++y)
                for (int64_t xw = 0; xw < s.w; ++xw)
                  gx[((n * s.c + ic) * s.h + y) * s.w + xw] +=
                      g[((n * os.c + c) * os.h + y * r + dy) * os.w + xw * r + dx];
            }
    });
  }
  return out;
}

namespace {

struct BilinearCoef {
  int64_t lo;
  int64_t hi;
  double frac;
};

std::vector<BilinearCoef> bilinear_axis(int64_t in, int64_t out) {
  std::vector<BilinearCoef> coefs(static_cast<size_t>(out));
  const double scale =
      out > 1 ? static_cast<double>(in - 1) / static_cast<double>(out - 1) : 0.0;
  for (int64_t i = 0; i < out; ++i) {
    const double src = static_cast<double>(i) * scale;
    int64_t lo = static_cast<int64_t>(std::floor(src));
    lo = std::min(lo, in - 1);
    const int64_t hi = std::min(lo + 1, in - 1);
    coefs[static_cast<size_t>(i)] = {lo, hi, src - static_cast<double>(lo)};
  }
  return coefs;
}

}  // namespace

Tensor resize(const Tensor& x, int64_t out_h, int64_t out_w, ResizeMode mode) {
  const Shape s = x.shape();
  if (out_h < 1 || out_w < 1) throw ContractError("resize: target dims must be >= 1");
  if (s.h < 1 || s.w < 1) throw ContractError("resize: source dims must be >= 1");
  if (s.h == out_h && s.w == out_w) {
    // Identity resize still goes through the graph so gradients flow.
    return ops::add(x, Tensor::zeros(s));
  }
  const bool track = tracking(x);
  const Shape os{s.n, s.c, out_h, out_w};
  Tensor out = make_op_output(os, track);
  const int64_t planes = s.n * s.c;
  const double* px = x.data();
  double* po = out.data();

  if (mode == ResizeMode::kNearest) {
    for (int64_t p = 0; p < planes; ++p) {
      const double* ip = px + p * s.h * s.w;
      double* op = po + p * out_h * out_w;
      for (int64_t y = 0; y < out_h; ++y) {
        const int64_t sy = y * s.h / out_h;
        for (int64_t xw = 0; xw < out_w; ++xw) op[y * out_w + xw] = ip[sy * s.w + xw * s.w / out_w];
      }
    }
  } else {
    const auto ys = bilinear_axis(s.h, out_h);
    const auto xs = bilinear_axis(s.w, out_w);
    for (int64_t p = 0; p < planes; ++p) {
      const double* ip = px + p * s.h * s.w;
      double* op = po + p * out_h * out_w;
      for (int64_t y = 0; y < out_h; ++y) {
        const auto& cy = ys[static_cast<size_t>(y)];
        for (int64_t xw = 0; xw < out_w; ++xw) {
          const auto& cx = xs[static_cast<size_t>(xw)];
          const double v00 = ip[cy.lo * s.w + cx.lo];
          const double v01 = ip[cy.lo * s.w + cx.hi];
          const double v10 = ip[cy.hi * s.w + cx.lo];
          const double v11 = ip[cy.hi * s.w + cx.hi];
          const double top = v00 + cx.frac * (v01 - v00);
          const double bot = v10 + cx.frac * (v11 - v10);
          op[y * out_w + xw] = top + cy.frac * (bot - top);
        }
      }
    }
  }

  if (track) {
    Tensor xc = x, oc = out;
    Tape::active()->record("resize", out, [mode, xc, oc]() mutable {
      const Shape s = xc.shape();
      const Shape os = oc.shape();
      const int64_t planes = s.n * s.c;
      double* gx = xc.grad();
      const double* g = oc.grad();
      if (mode == ResizeMode::kNearest) {
        for (int64_t p = 0; p < planes; ++p) {
          double* ip = gx + p * s.h * s.w;
          const double* op = g + p * os.h * os.w;
          for (int64_t y = 0; y < os.h; ++y) {
            const int64_t sy = y * s.h / os.h;
            for (int64_t xw = 0; xw < os.w; ++xw)
              ip[sy * s.w + xw * s.w / os.w] += op[y * os.w + xw];
          }
        }
      } else {
        const auto ys = bilinear_axis(s.h, os.h);
        const auto xs = bilinear_axis(s.w, os.w);
        for (int64_t p = 0; p < planes; ++p) {
          double* ip = gx + p * s.h * s.w;
          const double* op = g + p * os.h * os.w;
          for (int64_t y = 0; y < os.h; ++y) {
            const auto& cy = ys[static_cast<size_t>(y)];
            for (int64_t xw = 0; xw < os.w; ++xw) {
              const auto& cx = xs[static_cast<size_t>(xw)];
              const double gv = op[y * os.w + xw];
              ip[cy.lo * s.w + cx.lo] += (1.0 - cy.frac) * (1.0 - cx.frac) * gv;
              ip[cy.lo * s.w + cx.hi] += (1.0 - cy.frac) * cx.frac * gv;
              ip[cy.hi * s.w + cx.lo] += cy.frac * (1.0 - cx.frac) * gv;
              ip[cy.hi * s.w + cx.hi] += cy.frac * cx.frac * gv;
            }
          }
        }
      }
    });
  }
  return out;
}

Tensor global_avg_pool(const Tensor& x) {
  if (x.shape().h * x.shape().w < 1) throw ContractError("global_avg_pool: empty spatial dims");
  return ops::mean_spatial(x);
}

Tensor gated_block(const Tensor& f, const Tensor& mask, const GateBlockParams& p) {
  const Shape fs = f.shape();
  const Shape ws = p.conv.weight.shape();
  if (ws.n != ws.c || ws.n != fs.c)
    throw ShapeError("gated_block: conv must map " + std::to_string(fs.c) + " -> " +
                     std::to_string(fs.c) + " channels, weight is " + ws.str());
  if (p.conv.stride != 1 || 2 * p.conv.pad != ws.h - 1)
    throw ContractError("gated_block: conv must preserve spatial size");
  const Shape ms = mask.shape();
  if (ms.n != fs.n || ms.c != 1)
    throw ShapeError("gated_block: mask must be (N,1,h,w), got " + ms.str());

  // The mask is a constant input; validate range, clamp the 1e-9 fuzz, detach.
  Tensor m = mask.detach().clone();
  double* pm = m.data();
  for (int64_t i = 0; i < m.numel(); ++i) {
    if (pm[i] < -1e-9 || pm[i] > 1.0 + 1e-9)
      throw ContractError("gated_block: mask value " + std::to_string(pm[i]) +
                          " outside [0,1]");
    pm[i] = std::min(std::max(pm[i], 0.0), 1.0);
  }
  Tensor m_full = (ms.h == fs.h && ms.w == fs.w)
                      ? m
                      : resize(m, fs.h, fs.w, ResizeMode::kBilinear);
  Tensor gate = ops::mul(conv2d(f, p.conv), m_full);
  return ops::add(f, gate);
}

}  // namespace mgrs
