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

#include <atomic>
#include <vector>

#include "mgrs/common.hpp"
#include "mgrs/kernels.hpp"

namespace mgrs::kernels {

bool avx2_supported() {
#if defined(MGRS_WITH_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

#if !defined(MGRS_WITH_AVX2)
const KernelTable& avx2_table() {
  throw ContractError("avx2 kernels not built for this target");
}
#endif

namespace {
std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* pick_auto() {
  return avx2_supported() ? &avx2_table() : &scalar_table();
}
}  // namespace

void set_backend(Backend backend) {
  switch (backend) {
    case Backend::kAuto:
      g_active.store(pick_auto());
      break;
    case Backend::kScalar:
      g_active.store(&scalar_table());
      break;
    case Backend::kAvx2:
      if (!avx2_supported()) throw ContractError("simd=avx2 requested but CPU lacks AVX2");
      g_active.store(&avx2_table());
      break;
  }
}

Backend backend_from_string(const std::string& name) {
  if (name == "auto") return Backend::kAuto;
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  throw ContractError("unknown simd backend '" + name + "' (auto|scalar|avx2)");
}

const KernelTable& active() {
  const KernelTable* t = g_active.load();
  if (!t) {
    t = pick_auto();
    g_active.store(t);
  }
  return *t;
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> v{&scalar_table()};
  if (avx2_supported()) v.push_back(&avx2_table());
  return v;
}

void conv2d_bwd_input(const ConvGeom& g, const double* w, const double* gout, double* gin) {
  const int64_t flip_pad = g.k - 1 - g.pad;
  if (g.stride == 1 && flip_pad >= 0) {
    // Stride-1 input gradient is a forward pass over gout with the
    // co/ci-transposed, spatially flipped weights.
    std::vector<double> wt(static_cast<size_t>(g.cin * g.cout * g.k * g.k));
    for (int64_t co = 0; co < g.cout; ++co)
      for (int64_t ci = 0; ci < g.cin; ++ci)
        for (int64_t ky = 0; ky < g.k; ++ky)
          for (int64_t kx = 0; kx < g.k; ++kx)
            wt[((ci * g.cout + co) * g.k + (g.k - 1 - ky)) * g.k + (g.k - 1 - kx)] =
                w[((co * g.cin + ci) * g.k + ky) * g.k + kx];

    ConvGeom gt{g.n, g.cout, g.oh, g.ow, g.cin, g.k, 1, flip_pad, g.h, g.w};
    std::vector<double> tmp(static_cast<size_t>(g.n * g.cin * g.h * g.w));
    active().conv2d_fwd(gt, gout, wt.data(), nullptr, tmp.data());
    active().axpy(gin, 1.0, tmp.data(), static_cast<int64_t>(tmp.size()));
    return;
  }

  // Generic stride: scatter each output gradient back to its window.
  // Backend-independent by construction.
  const int64_t xplane = g.h * g.w;
  const int64_t oplane = g.oh * g.ow;
  for (int64_t n = 0; n < g.n; ++n) {
    double* gn = gin + n * g.cin * xplane;
    const double* gon = gout + n * g.cout * oplane;
    for (int64_t co = 0; co < g.cout; ++co) {
      const double* wc = w + co * g.cin * g.k * g.k;
      for (int64_t oy = 0; oy < g.oh; ++oy) {
        for (int64_t ox = 0; ox < g.ow; ++ox) {
          const double gv = gon[co * oplane + oy * g.ow + ox];
          for (int64_t ci = 0; ci < g.cin; ++ci) {
            const double* wk = wc + ci * g.k * g.k;
            double* gc = gn + ci * xplane;
            for (int64_t ky = 0; ky < g.k; ++ky) {
              const int64_t iy = oy * g.stride - g.pad + ky;
              if (iy < 0 || iy >= g.h) continue;
              for (int64_t kx = 0; kx < g.k; ++kx) {
                const int64_t ix = ox * g.stride - g.pad + kx;
                if (ix < 0 || ix >= g.w) continue;
                gc[iy * g.w + ix] += wk[ky * g.k + kx] * gv;
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace mgrs::kernels
