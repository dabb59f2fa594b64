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

// Scalar reference kernels. These define the numerical semantics; the SIMD
// tables must reproduce them bit for bit.

#include <cmath>

#include "mgrs/kernels.hpp"

namespace mgrs::kernels {
namespace {

void s_add(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void s_sub(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void s_mul(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void s_scale(const double* a, double f, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * f;
}

void s_axpy(double* y, double a, const double* x, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_mul_acc(double* dst, const double* a, const double* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}

void s_relu(const double* x, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_relu_grad_acc(double* gin, const double* x, const double* gout, int64_t n) {
  for (int64_t i = 0; i < n; ++i) gin[i] += x[i] > 0.0 ? gout[i] : 0.0;
}

void s_conv2d_fwd(const ConvGeom& g, const double* x, const double* w,
                  const double* bias, double* out) {
  const int64_t xplane = g.h * g.w;
  const int64_t oplane = g.oh * g.ow;
  for (int64_t n = 0; n < g.n; ++n) {
    const double* xn = x + n * g.cin * xplane;
    double* on = out + n * g.cout * oplane;
    for (int64_t co = 0; co < g.cout; ++co) {
      const double* wc = w + co * g.cin * g.k * g.k;
      const double b = bias ? bias[co] : 0.0;
      for (int64_t oy = 0; oy < g.oh; ++oy) {
        for (int64_t ox = 0; ox < g.ow; ++ox) {
          double acc = b;
          for (int64_t ci = 0; ci < g.cin; ++ci) {
            const double* xc = xn + ci * xplane;
            const double* wk = wc + ci * g.k * g.k;
            for (int64_t ky = 0; ky < g.k; ++ky) {
              const int64_t iy = oy * g.stride - g.pad + ky;
              if (iy < 0 || iy >= g.h) continue;
              for (int64_t kx = 0; kx < g.k; ++kx) {
                const int64_t ix = ox * g.stride - g.pad + kx;
                if (ix < 0 || ix >= g.w) continue;
                acc += wk[ky * g.k + kx] * xc[iy * g.w + ix];
              }
            }
          }
          on[co * oplane + oy * g.ow + ox] = acc;
        }
      }
    }
  }
}

// Patch formulation: for each output position gather the (cin*k*k) input
// window once (zeros where the window leaves the image), then accumulate
// g * patch into every output channel's weight row. Per-element accumulation
// order is (n, oy, ox) for both gw and gb.
void s_conv2d_bwd_weight(const ConvGeom& g, const double* x, const double* gout,
                         double* gw, double* gb, double* patch) {
  const int64_t xplane = g.h * g.w;
  const int64_t oplane = g.oh * g.ow;
  const int64_t row = g.cin * g.k * g.k;
  for (int64_t n = 0; n < g.n; ++n) {
    const double* xn = x + n * g.cin * xplane;
    const double* gn = gout + n * g.cout * oplane;
    for (int64_t oy = 0; oy < g.oh; ++oy) {
      for (int64_t ox = 0; ox < g.ow; ++ox) {
        for (int64_t ci = 0; ci < g.cin; ++ci) {
          const double* xc = xn + ci * xplane;
          double* pc = patch + ci * g.k * g.k;
          for (int64_t ky = 0; ky < g.k; ++ky) {
            const int64_t iy = oy * g.stride - g.pad + ky;
            for (int64_t kx = 0; kx < g.k; ++kx) {
              const int64_t ix = ox * g.stride - g.pad + kx;
              pc[ky * g.k + kx] =
                  (iy < 0 || iy >= g.h || ix < 0 || ix >= g.w) ? 0.0 : xc[iy * g.w + ix];
            }
          }
        }
        for (int64_t co = 0; co < g.cout; ++co) {
          const double gv = gn[co * oplane + oy * g.ow + ox];
          double* gwr = gw + co * row;
          for (int64_t j = 0; j < row; ++j) gwr[j] += gv * patch[j];
          gb[co] += gv;
        }
      }
    }
  }
}

void s_adam_step(double* p, double* m, double* v, const double* grad, int64_t n,
                 double lr, double beta1, double beta2, double eps, double c1, double c2) {
  for (int64_t i = 0; i < n; ++i) {
    const double gi = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
    v[i] = beta2 * v[i] + (1.0 - beta2) * (gi * gi);
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    p[i] = p[i] - lr * (mhat / (std::sqrt(vhat) + eps));
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      "scalar",    s_add,        s_sub,
      s_mul,       s_scale,      s_axpy,
      s_mul_acc,   s_relu,       s_relu_grad_acc,
      s_conv2d_fwd, s_conv2d_bwd_weight, s_adam_step,
  };
  return table;
}

}  // namespace mgrs::kernels
