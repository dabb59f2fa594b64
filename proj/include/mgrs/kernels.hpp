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
#include <string>
#include <vector>

namespace mgrs::kernels {

// Low-level numeric kernels behind the tensor ops. Two implementations ship:
// a scalar reference table and an AVX2 table selected at runtime. Both are
// bit-identical by construction: every output element is accumulated in the
// same operation order (mul then add, never FMA; the build disables FP
// contraction), and SIMD variants only vectorize across independent output
// elements. The equivalence tests assert exact equality, so which table runs
// never changes numerical results.

/// Geometry of a 2-D cross-correlation. oh/ow are the output extent,
/// oh = floor((h + 2*pad - k) / stride) + 1 and likewise ow.
struct ConvGeom {
  int64_t n;
  int64_t cin;
  int64_t h;
  int64_t w;
  int64_t cout;
  int64_t k;
  int64_t stride;
  int64_t pad;
  int64_t oh;
  int64_t ow;
};

struct KernelTable {
  const char* name;

  // out[i] = a[i] (+|-|*) b[i]
  void (*add)(const double* a, const double* b, double* out, int64_t count);
  void (*sub)(const double* a, const double* b, double* out, int64_t count);
  void (*mul)(const double* a, const double* b, double* out, int64_t count);
  // out[i] = a[i] * factor
  void (*scale)(const double* a, double factor, double* out, int64_t count);
  // y[i] += a * x[i]
  void (*axpy)(double* y, double a, const double* x, int64_t count);
  // dst[i] += a[i] * b[i]
  void (*mul_acc)(double* dst, const double* a, const double* b, int64_t count);
  // out[i] = max(0, x[i])
  void (*relu)(const double* x, double* out, int64_t count);
  // gin[i] += x[i] > 0 ? gout[i] : 0
  void (*relu_grad_acc)(double* gin, const double* x, const double* gout, int64_t count);

  // Cross-correlation, weight layout (cout, cin, k, k), zero padding.
  // out element order: bias then += w*x over (cin, ky, kx).
  void (*conv2d_fwd)(const ConvGeom& g, const double* x, const double* w,
                     const double* bias, double* out);
  // Accumulates into gw (cout, cin*k*k) and gb (cout). patch must hold
  // cin*k*k doubles of scratch. Accumulation order over (n, oy, ox).
  void (*conv2d_bwd_weight)(const ConvGeom& g, const double* x, const double* gout,
                            double* gw, double* gb, double* patch);

  // In-place Adam update over one parameter blob. c1 = 1 - beta1^t,
  // c2 = 1 - beta2^t precomputed by the caller.
  void (*adam_step)(double* p, double* m, double* v, const double* grad, int64_t count,
                    double lr, double beta1, double beta2, double eps, double c1, double c2);
};

const KernelTable& scalar_table();
bool avx2_supported();
const KernelTable& avx2_table();  // valid only when avx2_supported()

enum class Backend { kAuto, kScalar, kAvx2 };

/// Selects the process-wide table. kAuto picks AVX2 when the CPU has it.
/// Throws ContractError for kAvx2 on hardware without AVX2.
void set_backend(Backend backend);
Backend backend_from_string(const std::string& name);  // "auto"|"scalar"|"avx2"

const KernelTable& active();

/// Every table usable on this machine (scalar always, AVX2 when supported).
std::vector<const KernelTable*> available_tables();

// Gradient of the convolution input. Stride 1 reduces to a forward pass over
// gout with the flipped/transposed weights and runs on the active table;
// strided convolutions use a scalar scatter (identical on every backend).
// Accumulates into gin.
void conv2d_bwd_input(const ConvGeom& g, const double* w, const double* gout, double* gin);

}  // namespace mgrs::kernels
