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

// Scalar vs SIMD kernel equivalence. The contract is bit-exact equality:
// the SIMD tables only vectorize across independent output elements with
// the same per-element operation order as the scalar reference.

#include <doctest.h>

#include <cstring>
#include <vector>

#include "mgrs/kernels.hpp"
#include "mgrs/rng.hpp"

using namespace mgrs;
using kernels::ConvGeom;
using kernels::KernelTable;

namespace {

std::vector<double> random_vec(size_t n, Rng& rng, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar and simd kernel tables are bit-identical") {
  const auto tables = kernels::available_tables();
  if (tables.size() < 2) {
    MESSAGE("no SIMD table on this machine; scalar-only");
    return;
  }
  const KernelTable& ref = *tables[0];
  Rng rng(991);

  // Ragged sizes exercise the vector body and the scalar tails.
  const std::vector<int64_t> sizes{1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 63, 64, 65, 1000, 1003};

  for (size_t ti = 1; ti < tables.size(); ++ti) {
    const KernelTable& alt = *tables[ti];
    CAPTURE(alt.name);

    for (int64_t n : sizes) {
      const auto a = random_vec(static_cast<size_t>(n), rng);
      const auto b = random_vec(static_cast<size_t>(n), rng);
      std::vector<double> r1(static_cast<size_t>(n)), r2(static_cast<size_t>(n));

      ref.add(a.data(), b.data(), r1.data(), n);
      alt.add(a.data(), b.data(), r2.data(), n);
      CHECK(bits_equal(r1, r2));

      ref.sub(a.data(), b.data(), r1.data(), n);
      alt.sub(a.data(), b.data(), r2.data(), n);
      CHECK(bits_equal(r1, r2));

      ref.mul(a.data(), b.data(), r1.data(), n);
      alt.mul(a.data(), b.data(), r2.data(), n);
      CHECK(bits_equal(r1, r2));

      ref.scale(a.data(), 1.7351, r1.data(), n);
      alt.scale(a.data(), 1.7351, r2.data(), n);
      CHECK(bits_equal(r1, r2));

      ref.relu(a.data(), r1.data(), n);
      alt.relu(a.data(), r2.data(), n);
      CHECK(bits_equal(r1, r2));

      auto y1 = random_vec(static_cast<size_t>(n), rng);
      auto y2 = y1;
      ref.axpy(y1.data(), -0.37, a.data(), n);
      alt.axpy(y2.data(), -0.37, a.data(), n);
      CHECK(bits_equal(y1, y2));

      auto d1 = random_vec(static_cast<size_t>(n), rng);
      auto d2 = d1;
      ref.mul_acc(d1.data(), a.data(), b.data(), n);
      alt.mul_acc(d2.data(), a.data(), b.data(), n);
      CHECK(bits_equal(d1, d2));

      auto g1 = random_vec(static_cast<size_t>(n), rng);
      auto g2 = g1;
      ref.relu_grad_acc(g1.data(), a.data(), b.data(), n);
      alt.relu_grad_acc(g2.data(), a.data(), b.data(), n);
      CHECK(bits_equal(g1, g2));
    }
  }
}

TEST_CASE("conv2d kernels are bit-identical across tables") {
  const auto tables = kernels::available_tables();
  if (tables.size() < 2) return;
  const KernelTable& ref = *tables[0];
  Rng rng(313);

  struct Case {
    int64_t n, cin, h, w, cout, k, stride, pad;
  };
  // Widths chosen to hit the vector interior, both borders and the tails.
  const std::vector<Case> cases{
      {1, 1, 5, 5, 1, 3, 1, 1},  {2, 3, 8, 8, 4, 3, 1, 1},  {1, 2, 9, 13, 3, 3, 1, 1},
      {1, 4, 6, 6, 2, 1, 1, 0},  {2, 2, 12, 17, 5, 3, 1, 1}, {1, 3, 7, 7, 4, 3, 2, 1},
      {2, 5, 10, 21, 3, 3, 1, 1}, {1, 1, 3, 3, 1, 3, 1, 0},
  };

  for (size_t ti = 1; ti < tables.size(); ++ti) {
    const KernelTable& alt = *tables[ti];
    CAPTURE(alt.name);
    for (const Case& c : cases) {
      ConvGeom g{c.n,      c.cin, c.h, c.w, c.cout, c.k, c.stride, c.pad,
                 (c.h + 2 * c.pad - c.k) / c.stride + 1,
                 (c.w + 2 * c.pad - c.k) / c.stride + 1};
      const auto x = random_vec(static_cast<size_t>(g.n * g.cin * g.h * g.w), rng);
      const auto w = random_vec(static_cast<size_t>(g.cout * g.cin * g.k * g.k), rng);
      const auto bias = random_vec(static_cast<size_t>(g.cout), rng);
      std::vector<double> o1(static_cast<size_t>(g.n * g.cout * g.oh * g.ow));
      std::vector<double> o2(o1.size());
      ref.conv2d_fwd(g, x.data(), w.data(), bias.data(), o1.data());
      alt.conv2d_fwd(g, x.data(), w.data(), bias.data(), o2.data());
      CHECK(bits_equal(o1, o2));

      const auto gout = random_vec(o1.size(), rng);
      std::vector<double> gw1(w.size(), 0.0), gw2(w.size(), 0.0);
      std::vector<double> gb1(bias.size(), 0.0), gb2(bias.size(), 0.0);
      std::vector<double> patch(static_cast<size_t>(g.cin * g.k * g.k));
      ref.conv2d_bwd_weight(g, x.data(), gout.data(), gw1.data(), gb1.data(), patch.data());
      alt.conv2d_bwd_weight(g, x.data(), gout.data(), gw2.data(), gb2.data(), patch.data());
      CHECK(bits_equal(gw1, gw2));
      CHECK(bits_equal(gb1, gb2));
    }
  }
}

TEST_CASE("adam kernel is bit-identical across tables") {
  const auto tables = kernels::available_tables();
  if (tables.size() < 2) return;
  const KernelTable& ref = *tables[0];
  Rng rng(555);
  for (size_t ti = 1; ti < tables.size(); ++ti) {
    const KernelTable& alt = *tables[ti];
    for (int64_t n : {1, 3, 4, 5, 17, 256, 1001}) {
      auto p1 = random_vec(static_cast<size_t>(n), rng);
      auto m1 = random_vec(static_cast<size_t>(n), rng, 0.0, 0.1);
      auto v1 = random_vec(static_cast<size_t>(n), rng, 0.0, 0.1);
      const auto g = random_vec(static_cast<size_t>(n), rng);
      auto p2 = p1, m2 = m1, v2 = v1;
      const double c1 = 1.0 - 0.9, c2 = 1.0 - 0.999;
      ref.adam_step(p1.data(), m1.data(), v1.data(), g.data(), n, 1e-3, 0.9, 0.999, 1e-8, c1, c2);
      alt.adam_step(p2.data(), m2.data(), v2.data(), g.data(), n, 1e-3, 0.9, 0.999, 1e-8, c1, c2);
      CHECK(bits_equal(p1, p2));
      CHECK(bits_equal(m1, m2));
      CHECK(bits_equal(v1, v2));
    }
  }
}

TEST_CASE("backend selection is explicit and reversible") {
  kernels::set_backend(kernels::Backend::kScalar);
  CHECK(std::string(kernels::active().name) == "scalar");
  if (kernels::avx2_supported()) {
    kernels::set_backend(kernels::Backend::kAvx2);
    CHECK(std::string(kernels::active().name) == "avx2");
  }
  kernels::set_backend(kernels::Backend::kAuto);
  CHECK(kernels::backend_from_string("scalar") == kernels::Backend::kScalar);
  CHECK_THROWS_AS(kernels::backend_from_string("sse9"), ContractError);
}
