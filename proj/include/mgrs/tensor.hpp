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

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mgrs/common.hpp"
#include "mgrs/rng.hpp"

namespace mgrs {

/// Dense 4-D (N,C,H,W) tensor of doubles, row-major. Copies share storage
/// and autograd state (requires_grad flag + gradient buffer), so tensors are
/// cheap value types and every alias agrees about gradients; clone() and
/// detach() start fresh. Gradients accumulate until zero_grad().
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(const Shape& s);  // zeros

  static Tensor zeros(const Shape& s) { return Tensor(s); }
  static Tensor constant(const Shape& s, double value);
  static Tensor uniform(const Shape& s, Rng& rng, double lo, double hi);
  static Tensor he_normal(const Shape& s, Rng& rng, int64_t fan_in);
  static Tensor from_values(const Shape& s, std::vector<double> values);
  static Tensor scalar(double value) { return constant({1, 1, 1, 1}, value); }

  bool defined() const { return data_ != nullptr; }
  const Shape& shape() const { return shape_; }
  int64_t numel() const { return shape_.numel(); }

  double* data() { return data_->data(); }
  const double* data() const { return data_->data(); }

  bool requires_grad() const { return auto_ && auto_->requires_grad; }
  /// Marks the tensor trainable and allocates its gradient buffer. Shared
  /// with every alias of this tensor.
  Tensor& set_requires_grad(bool value);
  bool is_leaf() const { return is_leaf_; }

  bool has_grad() const { return auto_ && !auto_->grad.empty(); }
  double* grad();
  const double* grad() const;
  void ensure_grad();
  void zero_grad();

  /// Same storage, detached from autograd (no grad, not trainable).
  Tensor detach() const;
  /// Deep copy of the values (no grad, not trainable).
  Tensor clone() const;

  double at(int64_t n, int64_t c, int64_t h, int64_t w) const;
  double& at(int64_t n, int64_t c, int64_t h, int64_t w);
  double item() const;  // value of a (1,1,1,1) tensor

  bool same_storage(const Tensor& other) const { return data_ == other.data_; }
  bool all_finite() const;

 private:
  friend class Tape;
  friend Tensor make_op_output(const Shape& s, bool track);

  struct AutogradState {
    bool requires_grad = false;
    std::vector<double> grad;  // empty until needed, then numel-sized
  };

  Shape shape_{0, 0, 0, 0};
  std::shared_ptr<std::vector<double>> data_;
  std::shared_ptr<AutogradState> auto_;
  bool is_leaf_ = true;
};

/// Reverse-mode tape. Operations executed inside a TapeScope append nodes in
/// execution order (inputs always precede their consumers); backward() seeds
/// the scalar loss with 1 and replays the nodes in reverse. Non-leaf
/// gradients are reset at the start of each backward() so several losses can
/// be backpropagated through one tape; leaf gradients accumulate until
/// zero_grad().
class Tape {
 public:
  struct Node {
    const char* op;
    Tensor output;
    std::function<void()> backward;
  };

  void record(const char* op, const Tensor& output, std::function<void()> backward_fn);
  size_t size() const { return nodes_.size(); }

  void backward(Tensor& loss);

  static Tape* active();

 private:
  friend class TapeScope;
  std::vector<Node> nodes_;
};

/// RAII: makes a tape the active one for this thread.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

/// Ordered, uniquely named collection of trainable tensors. Iteration order
/// is insertion order and is stable across runs (checkpoint layout depends
/// on it).
class ParamSet {
 public:
  Tensor& add(const std::string& name, Tensor tensor);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  size_t size() const { return items_.size(); }
  const std::string& name(size_t i) const { return items_[i].first; }
  Tensor& tensor(size_t i) { return items_[i].second; }
  const Tensor& tensor(size_t i) const { return items_[i].second; }

  int64_t total_elements() const;
  void set_requires_grad(bool value);
  void zero_grads();

  /// Entries whose names start with prefix, prefix stripped. Tensors are
  /// shared with this set, not copied.
  ParamSet subset(const std::string& prefix) const;
  /// Adds every entry of other under prefix+name, sharing tensors.
  void absorb(const std::string& prefix, const ParamSet& other);

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
  std::unordered_map<std::string, size_t> index_;
};

namespace ops {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

enum class Reduce { kSum, kMean };
enum class Over { kAll, kSpatial };
Tensor reduce(Reduce op, Over over, const Tensor& a);
inline Tensor sum_all(const Tensor& a) { return reduce(Reduce::kSum, Over::kAll, a); }
inline Tensor mean_all(const Tensor& a) { return reduce(Reduce::kMean, Over::kAll, a); }
inline Tensor sum_spatial(const Tensor& a) { return reduce(Reduce::kSum, Over::kSpatial, a); }
inline Tensor mean_spatial(const Tensor& a) { return reduce(Reduce::kMean, Over::kSpatial, a); }

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
/// Softmax over the channel axis, independently per (n,h,w) position.
Tensor softmax_channels(const Tensor& a);

Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Mean over the batch axis, (N,C,H,W) -> (1,C,H,W).
Tensor mean_batch(const Tensor& a);

/// Mean absolute error; subgradient at zero difference is zero.
Tensor l1_loss(const Tensor& pred, const Tensor& target);
/// Mean binary cross entropy; pred is clamped to [1e-7, 1-1e-7] internally.
Tensor bce_loss(const Tensor& pred, const Tensor& target);

/// Values clamped to [0,1]. Inference helper, never recorded on a tape.
Tensor clamp01(const Tensor& a);

}  // namespace ops

/// Backpropagates from a scalar loss through the active tape.
void backward(Tensor& loss);

}  // namespace mgrs
