// Copyright 2026 The afsr Authors
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

#ifndef AFSR_TENSOR_H_
#define AFSR_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace afsr {

using Shape = std::vector<size_t>;

size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace internal {

// One value in the define-by-run graph. `inputs` and `backward` are only set
// on nodes produced by an op while gradient recording is on.
template <typename S>
struct Node {
  Shape shape;
  std::vector<S> value;
  std::vector<S> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads self.grad and accumulates into the grads of self.inputs.
  std::function<void(Node& self)> backward;

  std::vector<S>& EnsureGrad() {
    if (grad.size() != value.size()) grad.assign(value.size(), S(0));
    return grad;
  }
};

}  // namespace internal

// Dense row-major tensor with optional participation in reverse-mode
// differentiation. Copies share storage; use Clone() for a deep copy.
template <typename S>
class Tensor {
 public:
  using Scalar = S;
  using NodePtr = std::shared_ptr<internal::Node<S>>;

  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor Zeros(const Shape& shape, bool requires_grad = false);
  static Tensor Full(const Shape& shape, S value, bool requires_grad = false);
  static Tensor FromData(const Shape& shape, std::vector<S> values,
                         bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  size_t rank() const { return node_->shape.size(); }
  size_t dim(size_t axis) const;
  size_t numel() const { return node_->value.size(); }

  std::span<S> data() { return node_->value; }
  std::span<const S> data() const { return node_->value; }
  // Empty until a backward pass reaches this tensor.
  std::span<const S> grad() const { return node_->grad; }
  std::span<S> mutable_grad() { return node_->EnsureGrad(); }
  bool has_grad() const { return !node_->grad.empty(); }
  void ZeroGrad() { node_->grad.clear(); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  // Value of a single-element tensor.
  S item() const;
  // Element access for rank-2 tensors.
  S at(size_t row, size_t col) const;

  // Deep copy of the value, detached from any graph.
  Tensor Clone() const;
  // Same storage semantics as Clone(); the result is a fresh leaf.
  Tensor Detach() const { return Clone(); }

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

// Gradient recording is on by default and scoped per thread.
bool GradModeEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Runs the reverse pass from a single-element `loss`. Nodes are visited in
// reverse topological order exactly once; gradients accumulate into every
// reachable leaf with requires_grad. Interior graph links are released
// afterwards.
template <typename S>
void Backward(const Tensor<S>& loss);

// Clears the gradients of `params`, runs Backward(loss) and returns a copy of
// each parameter gradient (zeros for parameters the loss does not reach).
template <typename S>
std::vector<std::vector<S>> GradOf(const Tensor<S>& loss,
                                   std::span<Tensor<S>> params);

namespace internal {

// Wraps a freshly computed value as an op result. When recording is on and
// any input requires a gradient, the result joins the graph.
template <typename S>
Tensor<S> MakeResult(Shape shape, std::vector<S> value,
                     std::vector<Tensor<S>> inputs,
                     std::function<void(Node<S>&)> backward);

}  // namespace internal

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace afsr

#endif  // AFSR_TENSOR_H_
