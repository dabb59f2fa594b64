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

// AVX2 kernels. Compiled with -mavx2 in this translation unit only; callers
// go through the runtime dispatch in kernels_dispatch.cpp.
//
// Bit-exactness contract with the scalar table: vectorization only runs
// across independent output elements, each element sees the same sequence of
// IEEE operations as the scalar kernel (mul then add, no FMA), and tails /
// borders reuse the scalar element order. The equivalence tests assert exact
// equality, not a tolerance.

#include <immintrin.h>

#include <cmath>

#include "mgrs/kernels.hpp"

namespace mgrs::kernels {
namespace {

void a_add(const double* a, const double* b, double* out, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void a_sub(const double* a, const double* b, double* out, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void a_mul(const double* a, const double* b, double* out, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void a_scale(const double* a, double f, double* out, int64_t n) {
  const __m256d vf = _mm256_set1_pd(f);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vf));
  for (; i < n; ++i) out[i] = a[i] * f;
}

void a_axpy(double* y, double a, const double* x, int64_t n) {
  const __m256d va = _mm256_set1_pd(a);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void a_mul_acc(double* dst, const double* a, const double* b, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vd = _mm256_loadu_pd(dst + i);
    vd = _mm256_add_pd(vd, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(dst + i, vd);
  }
  for (; i < n; ++i) dst[i] += a[i] * b[i];
}

void a_relu(const double* x, double* out, int64_t n) {
  const __m256d vz = _mm256_setzero_pd();
  int64_t i = 0;
  // max_pd(x, 0) matches the scalar x > 0 ? x : 0, including -0.0 -> +0.0.
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), vz));
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void a_relu_grad_acc(double* gin, const double* x, const double* gout, int64_t n) {
  const __m256d vz = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), vz, _CMP_GT_OQ);
    const __m256d g = _mm256_and_pd(mask, _mm256_loadu_pd(gout + i));
    _mm256_storeu_pd(gin + i, _mm256_add_pd(_mm256_loadu_pd(gin + i), g));
  }
  for (; i < n; ++i) gin[i] += x[i] > 0.0 ? gout[i] : 0.0;
}

// One output element, scalar order. Shared by borders, tails and the
// generic-stride path.
inline double conv_element(const ConvGeom& g, const double* xn, const double* wc,
                           double bias, int64_t oy, int64_t ox) {
  const int64_t xplane = g.h * g.w;
  double acc = bias;
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
  return acc;
}

void a_conv2d_fwd(const ConvGeom& g, const double* x, const double* w,
                  const double* bias, double* out) {
  const int64_t xplane = g.h * g.w;
  const int64_t oplane = g.oh * g.ow;

  // Interior ox range where every lane and every kx stays inside the image
  // (stride 1 only): lanes ox..ox+3 need ox >= pad and
  // ox+3+k-1-pad <= w-1, i.e. the vector loop may run while
  // ox + 4 <= w - k + pad + 1.
  int64_t vec_lo = 0, vec_hi = 0;
  if (g.stride == 1) {
    vec_lo = g.pad;
    vec_hi = g.w - g.k + g.pad + 1;
    if (vec_hi > g.ow) vec_hi = g.ow;
    if (vec_hi < vec_lo) vec_hi = vec_lo;
  }

  for (int64_t n = 0; n < g.n; ++n) {
    const double* xn = x + n * g.cin * xplane;
    double* on = out + n * g.cout * oplane;
    for (int64_t co = 0; co < g.cout; ++co) {
      const double* wc = w + co * g.cin * g.k * g.k;
      const double b = bias ? bias[co] : 0.0;
      double* oc = on + co * oplane;
      for (int64_t oy = 0; oy < g.oh; ++oy) {
        double* orow = oc + oy * g.ow;
        if (g.stride != 1) {
          for (int64_t ox = 0; ox < g.ow; ++ox)
            orow[ox] = conv_element(g, xn, wc, b, oy, ox);
          continue;
        }
        int64_t ox = 0;
        for (; ox < vec_lo && ox < g.ow; ++ox)
          orow[ox] = conv_element(g, xn, wc, b, oy, ox);
        for (; ox + 4 <= vec_hi; ox += 4) {
          __m256d acc = _mm256_set1_pd(b);
          for (int64_t ci = 0; ci < g.cin; ++ci) {
            const double* xc = xn + ci * xplane;
            const double* wk = wc + ci * g.k * g.k;
            for (int64_t ky = 0; ky < g.k; ++ky) {
              const int64_t iy = oy - g.pad + ky;
              if (iy < 0 || iy >= g.h) continue;
              const double* xrow = xc + iy * g.w + (ox - g.pad);
              for (int64_t kx = 0; kx < g.k; ++kx) {
                const __m256d wv = _mm256_set1_pd(wk[ky * g.k + kx]);
                const __m256d xv = _mm256_loadu_pd(xrow + kx);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(wv, xv));
              }
            }
          }
          _mm256_storeu_pd(orow + ox, acc);
        }
        for (; ox < g.ow; ++ox)
          orow[ox] = conv_element(g, xn, wc, b, oy, ox);
      }
    }
  }
}

void a_conv2d_bwd_weight(const ConvGeom& g, const double* x, const double* gout,
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
          const __m256d vg = _mm256_set1_pd(gv);
          int64_t j = 0;
          for (; j + 4 <= row; j += 4) {
            __m256d acc = _mm256_loadu_pd(gwr + j);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(vg, _mm256_loadu_pd(patch + j)));
            _mm256_storeu_pd(gwr + j, acc);
          }
          for (; j < row; ++j) gwr[j] += gv * patch[j];
          gb[co] += gv;
        }
      }
    }
  }
}

void a_adam_step(double* p, double* m, double* v, const double* grad, int64_t n,
                 double lr, double beta1, double beta2, double eps, double c1, double c2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vomb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(grad + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_add_pd(_mm256_mul_pd(vb1, mi), _mm256_mul_pd(vomb1, gi));
    vi = _mm256_add_pd(_mm256_mul_pd(vb2, vi), _mm256_mul_pd(vomb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_div_pd(mi, vc1);
    const __m256d vhat = _mm256_div_pd(vi, vc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    const double gi = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
    v[i] = beta2 * v[i] + (1.0 - beta2) * (gi * gi);
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    p[i] = p[i] - lr * (mhat / (std::sqrt(vhat) + eps));
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table = {
      "avx2",      a_add,        a_sub,
      a_mul,       a_scale,      a_axpy,
      a_mul_acc,   a_relu,       a_relu_grad_acc,
      a_conv2d_fwd, a_conv2d_bwd_weight, a_adam_step,
  };
  return table;
}

}  // namespace mgrs::kernels
