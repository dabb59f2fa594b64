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

#include "mgrs/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mgrs/kernels.hpp"

namespace mgrs {

namespace {

int64_t checked_numel(const Shape& s) {
  if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0)
    throw ShapeError("negative dimension in shape " + s.str());
  __int128 p = 1;
  for (int64_t d : {s.n, s.c, s.h, s.w}) {
    p *= d;
    if (p > static_cast<__int128>(std::numeric_limits<int64_t>::max() / 16))
      throw ContractError("tensor size overflows index range: " + s.str());
  }
  return static_cast<int64_t>(p);
}

thread_local Tape* g_active_tape = nullptr;

}  // namespace

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

Tensor::Tensor(const Shape& s) : shape_(s) {
  const int64_t n = checked_numel(s);
  data_ = std::make_shared<std::vector<double>>(static_cast<size_t>(n), 0.0);
  auto_ = std::make_shared<AutogradState>();
}

Tensor Tensor::constant(const Shape& s, double value) {
  Tensor t(s);
  std::fill(t.data_->begin(), t.data_->end(), value);
  return t;
}

Tensor Tensor::uniform(const Shape& s, Rng& rng, double lo, double hi) {
  if (lo > hi) throw ContractError("uniform: lo > hi");
  Tensor t(s);
  for (double& v : *t.data_) v = rng.uniform(lo, hi);
  return t;
}

Tensor Tensor::he_normal(const Shape& s, Rng& rng, int64_t fan_in) {
  if (fan_in <= 0) throw ContractError("he_normal: fan_in must be positive");
  const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
  Tensor t(s);
  for (double& v : *t.data_) v = sigma * rng.next_normal();
  return t;
}

Tensor Tensor::from_values(const Shape& s, std::vector<double> values) {
  if (static_cast<int64_t>(values.size()) != checked_numel(s))
    throw ShapeError("from_values: got " + std::to_string(values.size()) +
                     " values for shape " + s.str());
  Tensor t;
  t.shape_ = s;
  t.data_ = std::make_shared<std::vector<double>>(std::move(values));
  t.auto_ = std::make_shared<AutogradState>();
  return t;
}

Tensor& Tensor::set_requires_grad(bool value) {
  if (!auto_) throw ContractError("set_requires_grad on undefined tensor");
  auto_->requires_grad = value;
  if (value) ensure_grad();
  return *this;
}

double* Tensor::grad() {
  if (!has_grad()) throw ContractError("grad buffer not allocated");
  return auto_->grad.data();
}

const double* Tensor::grad() const {
  if (!has_grad()) throw ContractError("grad buffer not allocated");
  return auto_->grad.data();
}

void Tensor::ensure_grad() {
  if (!auto_) throw ContractError("ensure_grad on undefined tensor");
  if (auto_->grad.empty()) auto_->grad.assign(data_ ? data_->size() : 0, 0.0);
}

void Tensor::zero_grad() {
  if (auto_) std::fill(auto_->grad.begin(), auto_->grad.end(), 0.0);
}

Tensor Tensor::detach() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_;
  t.auto_ = std::make_shared<AutogradState>();
  return t;
}

Tensor Tensor::clone() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = std::make_shared<std::vector<double>>(*data_);
  t.auto_ = std::make_shared<AutogradState>();
  return t;
}

double Tensor::at(int64_t n, int64_t c, int64_t h, int64_t w) const {
  return data()[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
}

double& Tensor::at(int64_t n, int64_t c, int64_t h, int64_t w) {
  return data()[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
}

double Tensor::item() const {
  if (numel() != 1) throw ContractError("item(): tensor is not scalar, shape " + shape_.str());
  return data()[0];
}

bool Tensor::all_finite() const {
  for (double v : *data_)
    if (!std::isfinite(v)) return false;
  return true;
}

// Output of a recorded op: non-leaf, with a grad buffer when tracked.
Tensor make_op_output(const Shape& s, bool track) {
  Tensor t(s);
  t.is_leaf_ = false;
  if (track) {
    t.auto_->requires_grad = true;
    t.ensure_grad();
  }
  return t;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

void Tape::record(const char* op, const Tensor& output, std::function<void()> backward_fn) {
  nodes_.push_back(Node{op, output, std::move(backward_fn)});
}

void Tape::backward(Tensor& loss) {
  if (!(loss.shape() == Shape{1, 1, 1, 1}))
    throw ContractError("backward: loss must have shape (1,1,1,1), got " + loss.shape().str());
  if (!loss.requires_grad() || !loss.has_grad())
    throw ContractError("backward: loss is not on the tape");
  // Intermediate grads are per-backward scratch; only leaves accumulate
  // across calls.
  for (Node& node : nodes_) node.output.zero_grad();
  loss.grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
}

Tape* Tape::active() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

void backward(Tensor& loss) {
  Tape* tape = Tape::active();
  if (!tape) throw ContractError("backward: no active tape");
  tape->backward(loss);
}

// ---------------------------------------------------------------------------
// ParamSet
// ---------------------------------------------------------------------------

Tensor& ParamSet::add(const std::string& name, Tensor tensor) {
  if (index_.count(name)) throw ContractError("duplicate parameter name: " + name);
  index_[name] = items_.size();
  items_.emplace_back(name, std::move(tensor));
  return items_.back().second;
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return items_[it->second].second;
}

const Tensor& ParamSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return items_[it->second].second;
}

bool ParamSet::contains(const std::string& name) const { return index_.count(name) != 0; }

int64_t ParamSet::total_elements() const {
  int64_t total = 0;
  for (const auto& [name, t] : items_) total += t.numel();
  return total;
}

void ParamSet::set_requires_grad(bool value) {
  for (auto& [name, t] : items_) t.set_requires_grad(value);
}

void ParamSet::zero_grads() {
  for (auto& [name, t] : items_) t.zero_grad();
}

ParamSet ParamSet::subset(const std::string& prefix) const {
  ParamSet out;
  for (const auto& [name, t] : items_)
    if (name.rfind(prefix, 0) == 0) out.add(name.substr(prefix.size()), t);
  return out;
}

void ParamSet::absorb(const std::string& prefix, const ParamSet& other) {
  for (const auto& [name, t] : other.items_) add(prefix + name, t);
}

// ---------------------------------------------------------------------------
// Elementwise ops
// ---------------------------------------------------------------------------

namespace ops {

namespace {

void check_defined(const Tensor& t, const char* who) {
  if (!t.defined()) throw ContractError(std::string(who) + ": undefined tensor");
}

// b broadcasts against a when every b dimension equals a's or is 1.
bool broadcast_ok(const Shape& a, const Shape& b) {
  return (b.n == a.n || b.n == 1) && (b.c == a.c || b.c == 1) && (b.h == a.h || b.h == 1) &&
         (b.w == a.w || b.w == 1);
}

bool tracking(const Tensor& a) { return Tape::active() && a.requires_grad(); }
bool tracking(const Tensor& a, const Tensor& b) {
  return Tape::active() && (a.requires_grad() || b.requires_grad());
}

// Applies fn(out_index, b_index) over a's index space with b broadcast.
template <typename Fn>
void for_each_broadcast(const Shape& as, const Shape& bs, Fn&& fn) {
  int64_t i = 0;
  for (int64_t n = 0; n < as.n; ++n) {
    const int64_t bn = bs.n == 1 ? 0 : n;
    for (int64_t c = 0; c < as.c; ++c) {
      const int64_t bc = bs.c == 1 ? 0 : c;
      for (int64_t h = 0; h < as.h; ++h) {
        const int64_t bh = bs.h == 1 ? 0 : h;
        const int64_t brow = ((bn * bs.c + bc) * bs.h + bh) * bs.w;
        for (int64_t w = 0; w < as.w; ++w, ++i) {
          fn(i, brow + (bs.w == 1 ? 0 : w));
        }
      }
    }
  }
}

enum class Bin { kAdd, kSub, kMul };

Tensor binary(Bin kind, const char* name, const Tensor& a, const Tensor& b) {
  check_defined(a, name);
  check_defined(b, name);
  const bool same = a.shape() == b.shape();
  if (!same && !broadcast_ok(a.shape(), b.shape()))
    throw ShapeError(std::string(name) + ": incompatible shapes " + a.shape().str() + " vs " +
                     b.shape().str());

  const bool track = tracking(a, b);
  Tensor out = make_op_output(a.shape(), track);
  const int64_t count = a.numel();
  const auto& k = kernels::active();

  if (same) {
    switch (kind) {
      case Bin::kAdd: k.add(a.data(), b.data(), out.data(), count); break;
      case Bin::kSub: k.sub(a.data(), b.data(), out.data(), count); break;
      case Bin::kMul: k.mul(a.data(), b.data(), out.data(), count); break;
    }
  } else {
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    switch (kind) {
      case Bin::kAdd:
        for_each_broadcast(a.shape(), b.shape(), [&](int64_t i, int64_t j) { po[i] = pa[i] + pb[j]; });
        break;
      case Bin::kSub:
        for_each_broadcast(a.shape(), b.shape(), [&](int64_t i, int64_t j) { po[i] = pa[i] - pb[j]; });
        break;
      case Bin::kMul:
        for_each_broadcast(a.shape(), b.shape(), [&](int64_t i, int64_t j) { po[i] = pa[i] * pb[j]; });
        break;
    }
  }

  if (track) {
    Tensor ac = a, bc = b, oc = out;
    Tape::active()->record(name, out, [kind, same, ac, bc, oc]() mutable {
      const int64_t count = ac.numel();
      const double* g = oc.grad();
      const auto& k = kernels::active();
      if (ac.requires_grad()) {
        double* ga = ac.grad();
        switch (kind) {
          case Bin::kAdd:
          case Bin::kSub: k.axpy(ga, 1.0, g, count); break;
          case Bin::kMul:
            if (same) {
              k.mul_acc(ga, g, bc.data(), count);
            } else {
              const double* pb = bc.data();
              for_each_broadcast(ac.shape(), bc.shape(),
                                 [&](int64_t i, int64_t j) { ga[i] += g[i] * pb[j]; });
            }
            break;
        }
      }
      if (bc.requires_grad()) {
        double* gb = bc.grad();
        const double sign = kind == Bin::kSub ? -1.0 : 1.0;
        if (same) {
          switch (kind) {
            case Bin::kAdd:
            case Bin::kSub: k.axpy(gb, sign, g, count); break;
            case Bin::kMul: k.mul_acc(gb, g, ac.data(), count); break;
          }
        } else {
          const double* pa = ac.data();
          switch (kind) {
            case Bin::kAdd:
            case Bin::kSub:
              for_each_broadcast(ac.shape(), bc.shape(),
                                 [&](int64_t i, int64_t j) { gb[j] += sign * g[i]; });
              break;
            case Bin::kMul:
              for_each_broadcast(ac.shape(), bc.shape(),
                                 [&](int64_t i, int64_t j) { gb[j] += g[i] * pa[i]; });
              break;
          }
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(Bin::kAdd, "add", a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(Bin::kSub, "sub", a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(Bin::kMul, "mul", a, b); }

Tensor scale(const Tensor& a, double factor) {
  check_defined(a, "scale");
  const bool track = tracking(a);
  Tensor out = make_op_output(a.shape(), track);
  kernels::active().scale(a.data(), factor, out.data(), a.numel());
  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("scale", out, [factor, ac, oc]() mutable {
      kernels::active().axpy(ac.grad(), factor, oc.grad(), ac.numel());
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

Tensor reduce(Reduce op, Over over, const Tensor& a) {
  check_defined(a, "reduce");
  const Shape as = a.shape();
  const int64_t plane = as.h * as.w;
  const int64_t planes = as.n * as.c;

  if (op == Reduce::kMean) {
    const int64_t denom = over == Over::kAll ? a.numel() : plane;
    if (denom == 0) throw ContractError("reduce: mean of empty tensor");
  }

  const bool track = tracking(a);
  const Shape os = over == Over::kAll ? Shape{1, 1, 1, 1} : Shape{as.n, as.c, 1, 1};
  Tensor out = make_op_output(os, track);

  const double* pa = a.data();
  if (over == Over::kAll) {
    double acc = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) acc += pa[i];
    out.data()[0] = op == Reduce::kMean ? acc / static_cast<double>(a.numel()) : acc;
  } else {
    for (int64_t p = 0; p < planes; ++p) {
      double acc = 0.0;
      const double* row = pa + p * plane;
      for (int64_t i = 0; i < plane; ++i) acc += row[i];
      out.data()[p] = op == Reduce::kMean ? acc / static_cast<double>(plane) : acc;
    }
  }

  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("reduce", out, [op, over, plane, planes, ac, oc]() mutable {
      double* ga = ac.grad();
      const double* g = oc.grad();
      if (over == Over::kAll) {
        const double gv =
            op == Reduce::kMean ? g[0] / static_cast<double>(ac.numel()) : g[0];
        for (int64_t i = 0; i < ac.numel(); ++i) ga[i] += gv;
      } else {
        for (int64_t p = 0; p < planes; ++p) {
          const double gv = op == Reduce::kMean ? g[p] / static_cast<double>(plane) : g[p];
          double* row = ga + p * plane;
          for (int64_t i = 0; i < plane; ++i) row[i] += gv;
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& a) {
  check_defined(a, "relu");
  const bool track = tracking(a);
  Tensor out = make_op_output(a.shape(), track);
  kernels::active().relu(a.data(), out.data(), a.numel());
  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("relu", out, [ac, oc]() mutable {
      kernels::active().relu_grad_acc(ac.grad(), ac.data(), oc.grad(), ac.numel());
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& a) {
  check_defined(a, "sigmoid");
  const bool track = tracking(a);
  Tensor out = make_op_output(a.shape(), track);
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t i = 0; i < a.numel(); ++i) {
    const double x = pa[i];
    if (x >= 0.0) {
      po[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      po[i] = e / (1.0 + e);
    }
  }
  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("sigmoid", out, [ac, oc]() mutable {
      double* ga = ac.grad();
      const double* g = oc.grad();
      const double* s = oc.data();
      for (int64_t i = 0; i < ac.numel(); ++i) ga[i] += g[i] * s[i] * (1.0 - s[i]);
    });
  }
  return out;
}

Tensor softmax_channels(const Tensor& a) {
  check_defined(a, "softmax_channels");
  const Shape s = a.shape();
  const int64_t plane = s.h * s.w;
  const bool track = tracking(a);
  Tensor out = make_op_output(s, track);
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t n = 0; n < s.n; ++n) {
    for (int64_t hw = 0; hw < plane; ++hw) {
      const int64_t base = n * s.c * plane + hw;
      double mx = -std::numeric_limits<double>::infinity();
      for (int64_t c = 0; c < s.c; ++c) mx = std::max(mx, pa[base + c * plane]);
      double sum = 0.0;
      for (int64_t c = 0; c < s.c; ++c) {
        const double e = std::exp(pa[base + c * plane] - mx);
        po[base + c * plane] = e;
        sum += e;
      }
      for (int64_t c = 0; c < s.c; ++c) po[base + c * plane] /= sum;
    }
  }
  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("softmax_channels", out, [ac, oc]() mutable {
      const Shape s = ac.shape();
      const int64_t plane = s.h * s.w;
      double* ga = ac.grad();
      const double* g = oc.grad();
      const double* sm = oc.data();
      for (int64_t n = 0; n < s.n; ++n) {
        for (int64_t hw = 0; hw < plane; ++hw) {
          const int64_t base = n * s.c * plane + hw;
          double dot = 0.0;
          for (int64_t c = 0; c < s.c; ++c) dot += g[base + c * plane] * sm[base + c * plane];
          for (int64_t c = 0; c < s.c; ++c) {
            const int64_t i = base + c * plane;
            ga[i] += sm[i] * (g[i] - dot);
          }
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure ops
// ---------------------------------------------------------------------------

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  check_defined(a, "concat_channels");
  check_defined(b, "concat_channels");
  const Shape as = a.shape(), bs = b.shape();
  if (as.n != bs.n || as.h != bs.h || as.w != bs.w)
    throw ShapeError("concat_channels: " + as.str() + " vs " + bs.str());
  const bool track = tracking(a, b);
  Tensor out = make_op_output({as.n, as.c + bs.c, as.h, as.w}, track);
  const int64_t ablock = as.c * as.h * as.w;
  const int64_t bblock = bs.c * bs.h * bs.w;
  for (int64_t n = 0; n < as.n; ++n) {
    std::memcpy(out.data() + n * (ablock + bblock), a.data() + n * ablock,
                sizeof(double) * static_cast<size_t>(ablock));
    std::memcpy(out.data() + n * (ablock + bblock) + ablock, b.data() + n * bblock,
                sizeof(double) * static_cast<size_t>(bblock));
  }
  if (track) {
    Tensor ac = a, bc = b, oc = out;
    Tape::active()->record("concat_channels", out, [ablock, bblock, ac, bc, oc]() mutable {
      const double* g = oc.grad();
      const auto& k = kernels::active();
      for (int64_t n = 0; n < ac.shape().n; ++n) {
        const double* gn = g + n * (ablock + bblock);
        if (ac.requires_grad()) k.axpy(ac.grad() + n * ablock, 1.0, gn, ablock);
        if (bc.requires_grad()) k.axpy(bc.grad() + n * bblock, 1.0, gn + ablock, bblock);
      }
    });
  }
  return out;
}

Tensor mean_batch(const Tensor& a) {
  check_defined(a, "mean_batch");
  const Shape s = a.shape();
  if (s.n < 1) throw ContractError("mean_batch: empty batch");
  const int64_t block = s.c * s.h * s.w;
  const bool track = tracking(a);
  Tensor out = make_op_output({1, s.c, s.h, s.w}, track);
  const double* pa = a.data();
  double* po = out.data();
  const double inv = 1.0 / static_cast<double>(s.n);
  for (int64_t i = 0; i < block; ++i) {
    double acc = 0.0;
    for (int64_t n = 0; n < s.n; ++n) acc += pa[n * block + i];
    po[i] = acc * inv;
  }
  if (track) {
    Tensor ac = a, oc = out;
    Tape::active()->record("mean_batch", out, [block, ac, oc]() mutable {
      const double inv = 1.0 / static_cast<double>(ac.shape().n);
      const double* g = oc.grad();
      double* ga = ac.grad();
      for (int64_t n = 0; n < ac.shape().n; ++n)
        for (int64_t i = 0; i < block; ++i) ga[n * block + i] += g[i] * inv;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

Tensor l1_loss(const Tensor& pred, const Tensor& target) {
  check_defined(pred, "l1_loss");
  check_defined(target, "l1_loss");
  if (!(pred.shape() == target.shape()))
    throw ContractError("l1_loss: shape mismatch " + pred.shape().str() + " vs " +
                        target.shape().str());
  const int64_t count = pred.numel();
  if (count == 0) throw ContractError("l1_loss: empty tensors");
  const bool track = tracking(pred, target);
  Tensor out = make_op_output({1, 1, 1, 1}, track);
  const double* pp = pred.data();
  const double* pt = target.data();
  double acc = 0.0;
  for (int64_t i = 0; i < count; ++i) acc += std::abs(pp[i] - pt[i]);
  out.data()[0] = acc / static_cast<double>(count);
  if (track) {
    Tensor pc = pred, tc = target, oc = out;
    Tape::active()->record("l1_loss", out, [pc, tc, oc]() mutable {
      const int64_t count = pc.numel();
      const double s = oc.grad()[0] / static_cast<double>(count);
      const double* pp = pc.data();
      const double* pt = tc.data();
      for (int64_t i = 0; i < count; ++i) {
        const double d = pp[i] - pt[i];
        const double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        if (pc.requires_grad()) pc.grad()[i] += s * sg;
        if (tc.requires_grad()) tc.grad()[i] -= s * sg;
      }
    });
  }
  return out;
}

namespace {
constexpr double kBceLo = 1e-7;
constexpr double kBceHi = 1.0 - 1e-7;
}  // namespace

Tensor bce_loss(const Tensor& pred, const Tensor& target) {
  check_defined(pred, "bce_loss");
  check_defined(target, "bce_loss");
  if (!(pred.shape() == target.shape()))
    throw ContractError("bce_loss: shape mismatch " + pred.shape().str() + " vs " +
                        target.shape().str());
  const int64_t count = pred.numel();
  if (count == 0) throw ContractError("bce_loss: empty tensors");
  const bool track = tracking(pred, target);
  Tensor out = make_op_output({1, 1, 1, 1}, track);
  const double* pp = pred.data();
  const double* pt = target.data();
  double acc = 0.0;
  for (int64_t i = 0; i < count; ++i) {
    const double q = std::min(std::max(pp[i], kBceLo), kBceHi);
    acc -= pt[i] * std::log(q) + (1.0 - pt[i]) * std::log(1.0 - q);
  }
  out.data()[0] = acc / static_cast<double>(count);
  if (track) {
    Tensor pc = pred, tc = target, oc = out;
    Tape::active()->record("bce_loss", out, [pc, tc, oc]() mutable {
      const int64_t count = pc.numel();
      const double s = oc.grad()[0] / static_cast<double>(count);
      const double* pp = pc.data();
      const double* pt = tc.data();
      for (int64_t i = 0; i < count; ++i) {
        const double q = std::min(std::max(pp[i], kBceLo), kBceHi);
        if (pc.requires_grad() && pp[i] >= kBceLo && pp[i] <= kBceHi)
          pc.grad()[i] += s * (q - pt[i]) / (q * (1.0 - q));
        if (tc.requires_grad()) tc.grad()[i] += s * std::log((1.0 - q) / q);
      }
    });
  }
  return out;
}

Tensor clamp01(const Tensor& a) {
  check_defined(a, "clamp01");
  Tensor out(a.shape());
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t i = 0; i < a.numel(); ++i) po[i] = std::min(std::max(pa[i], 0.0), 1.0);
  return out;
}

}  // namespace ops
}  // namespace mgrs
