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

#include "afsr/adam.h"

#include <cmath>
#include <string>

#include "afsr/error.h"

namespace afsr {

template <typename S>
AdamState<S>::AdamState(const AdamOptions& opts,
                        std::span<const Tensor<S>> params)
    : options(opts) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const auto& p : params) {
    first_moment.emplace_back(p.numel(), S(0));
    second_moment.emplace_back(p.numel(), S(0));
  }
}

template <typename S>
void AdamStep(std::span<Tensor<S>> params,
              const std::vector<std::vector<S>>& grads, AdamState<S>& state) {
  if (grads.size() != params.size() ||
      state.first_moment.size() != params.size()) {
    throw DimensionError("adam: " + std::to_string(params.size()) +
                         " parameters, " + std::to_string(grads.size()) +
                         " gradients, " +
                         std::to_string(state.first_moment.size()) +
                         " moment slots");
  }
  const AdamOptions& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  const S b1 = S(o.beta1), b2 = S(o.beta2);
  for (size_t k = 0; k < params.size(); ++k) {
    auto value = params[k].data();
    const auto& g = grads[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (g.size() != value.size() || m.size() != value.size()) {
      throw DimensionError("adam: parameter " + std::to_string(k) + " has " +
                           std::to_string(value.size()) + " elements, gradient " +
                           std::to_string(g.size()));
    }
    for (size_t i = 0; i < value.size(); ++i) {
      m[i] = b1 * m[i] + (S(1) - b1) * g[i];
      v[i] = b2 * v[i] + (S(1) - b2) * g[i] * g[i];
      const S m_hat = m[i] / S(correction1);
      const S v_hat = v[i] / S(correction2);
      value[i] -= S(o.learning_rate) * m_hat / (std::sqrt(v_hat) + S(o.epsilon));
    }
  }
}

template <typename S>
void AdamStep(std::span<Tensor<S>> params, AdamState<S>& state) {
  std::vector<std::vector<S>> grads;
  grads.reserve(params.size());
  for (const auto& p : params) {
    if (p.has_grad()) {
      grads.emplace_back(p.grad().begin(), p.grad().end());
    } else {
      grads.emplace_back(p.numel(), S(0));
    }
  }
  AdamStep(params, grads, state);
}

template struct AdamState<float>;
template struct AdamState<double>;
template void AdamStep<float>(std::span<Tensor<float>>,
                              const std::vector<std::vector<float>>&,
                              AdamState<float>&);
template void AdamStep<double>(std::span<Tensor<double>>,
                               const std::vector<std::vector<double>>&,
                               AdamState<double>&);
template void AdamStep<float>(std::span<Tensor<float>>, AdamState<float>&);
template void AdamStep<double>(std::span<Tensor<double>>, AdamState<double>&);

}  // namespace afsr
