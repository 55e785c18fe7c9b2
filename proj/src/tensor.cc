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

#include "afsr/tensor.h"

#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "afsr/error.h"

namespace afsr {

size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1},
                         std::multiplies<>());
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {
thread_local bool grad_mode_enabled = true;
}  // namespace

bool GradModeEnabled() { return grad_mode_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_mode_enabled) {
  grad_mode_enabled = false;
}

NoGradGuard::~NoGradGuard() { grad_mode_enabled = previous_; }

template <typename S>
Tensor<S> Tensor<S>::Zeros(const Shape& shape, bool requires_grad) {
  return Full(shape, S(0), requires_grad);
}

template <typename S>
Tensor<S> Tensor<S>::Full(const Shape& shape, S value, bool requires_grad) {
  return FromData(shape, std::vector<S>(NumElements(shape), value),
                  requires_grad);
}

template <typename S>
Tensor<S> Tensor<S>::FromData(const Shape& shape, std::vector<S> values,
                              bool requires_grad) {
  for (size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor shape " + ShapeToString(shape) +
                           " has a zero-length axis");
    }
  }
  if (NumElements(shape) != values.size()) {
    throw DimensionError("shape " + ShapeToString(shape) + " needs " +
                         std::to_string(NumElements(shape)) +
                         " values, got " + std::to_string(values.size()));
  }
  auto node = std::make_shared<internal::Node<S>>();
  node->shape = shape;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename S>
size_t Tensor<S>::dim(size_t axis) const {
  if (axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeToString(shape()));
  }
  return node_->shape[axis];
}

template <typename S>
S Tensor<S>::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on tensor of shape " +
                         ShapeToString(shape()));
  }
  return node_->value[0];
}

template <typename S>
S Tensor<S>::at(size_t row, size_t col) const {
  return node_->value[row * node_->shape[1] + col];
}

template <typename S>
Tensor<S> Tensor<S>::Clone() const {
  return FromData(shape(), node_->value, false);
}

template <typename S>
void Backward(const Tensor<S>& loss) {
  using NodeT = internal::Node<S>;
  if (loss.numel() != 1) {
    throw ParameterError("backward requires a scalar loss, got shape " +
                         ShapeToString(loss.shape()));
  }
  NodeT* root = loss.node().get();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> visited;
  std::vector<std::pair<NodeT*, size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      NodeT* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->EnsureGrad()[0] += S(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
  for (NodeT* node : order) {
    if (node->backward) {
      node->backward = nullptr;
      node->inputs.clear();
      if (node != root) node->grad.clear();
    }
  }
}

template <typename S>
std::vector<std::vector<S>> GradOf(const Tensor<S>& loss,
                                   std::span<Tensor<S>> params) {
  for (auto& p : params) p.ZeroGrad();
  Backward(loss);
  std::vector<std::vector<S>> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    if (p.has_grad()) {
      grads.emplace_back(p.grad().begin(), p.grad().end());
    } else {
      grads.emplace_back(p.numel(), S(0));
    }
  }
  return grads;
}

namespace internal {

template <typename S>
Tensor<S> MakeResult(Shape shape, std::vector<S> value,
                     std::vector<Tensor<S>> inputs,
                     std::function<void(Node<S>&)> backward) {
  auto node = std::make_shared<Node<S>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (GradModeEnabled()) {
    bool any = false;
    for (const auto& in : inputs) any = any || in.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (const auto& in : inputs) node->inputs.push_back(in.node());
      node->backward = std::move(backward);
    }
  }
  return Tensor<S>(std::move(node));
}

}  // namespace internal

template class Tensor<float>;
template class Tensor<double>;
template void Backward<float>(const Tensor<float>&);
template void Backward<double>(const Tensor<double>&);
template std::vector<std::vector<float>> GradOf<float>(
    const Tensor<float>&, std::span<Tensor<float>>);
template std::vector<std::vector<double>> GradOf<double>(
    const Tensor<double>&, std::span<Tensor<double>>);
template Tensor<float> internal::MakeResult<float>(
    Shape, std::vector<float>, std::vector<Tensor<float>>,
    std::function<void(internal::Node<float>&)>);
template Tensor<double> internal::MakeResult<double>(
    Shape, std::vector<double>, std::vector<Tensor<double>>,
    std::function<void(internal::Node<double>&)>);

}  // namespace afsr
