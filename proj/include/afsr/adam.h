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

#ifndef AFSR_ADAM_H_
#define AFSR_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "afsr/tensor.h"

namespace afsr {

struct AdamOptions {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates for a fixed list of parameters.
template <typename S>
struct AdamState {
  AdamOptions options;
  uint64_t step = 0;
  std::vector<std::vector<S>> first_moment;
  std::vector<std::vector<S>> second_moment;

  AdamState() = default;
  AdamState(const AdamOptions& opts, std::span<const Tensor<S>> params);
};

// One bias-corrected Adam update of `params` using `grads`
// (one vector per parameter, same sizes). Increments state.step.
template <typename S>
void AdamStep(std::span<Tensor<S>> params,
              const std::vector<std::vector<S>>& grads, AdamState<S>& state);

// Same, reading each parameter's accumulated gradient (absent = zero).
template <typename S>
void AdamStep(std::span<Tensor<S>> params, AdamState<S>& state);

}  // namespace afsr

#endif  // AFSR_ADAM_H_
