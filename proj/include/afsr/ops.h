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

#ifndef AFSR_OPS_H_
#define AFSR_OPS_H_

#include <cstdint>
#include <random>

#include "afsr/tensor.h"

// Differentiable tensor primitives. Sequence tensors are laid out time-major:
// a [T x C] tensor stores the C channels of step t contiguously.
namespace afsr {

// "Same" convolution followed by striding.
//   input   [T x Cin]
//   kernels [Cout x width x Cin], width odd
//   bias    [Cout]
// Returns [ceil(T / stride) x Cout] with
//   out[t, co] = bias[co] + sum_{w, ci} kernels[co, w, ci] * x[t*stride + w - (width-1)/2, ci]
// where out-of-range x reads as zero.
template <typename S>
Tensor<S> Conv1d(const Tensor<S>& input, const Tensor<S>& kernels,
                 const Tensor<S>& bias, size_t stride);

template <typename S>
Tensor<S> Relu(const Tensor<S>& x);

// Inverted dropout: at train time zeroes each element with probability
// `rate` and scales survivors by 1 / (1 - rate). Identity when !training.
template <typename S>
Tensor<S> Dropout(const Tensor<S>& x, double rate, std::mt19937_64& rng,
                  bool training);

template <typename S>
Tensor<S> Add(const Tensor<S>& a, const Tensor<S>& b);
template <typename S>
Tensor<S> Sub(const Tensor<S>& a, const Tensor<S>& b);
template <typename S>
Tensor<S> Mul(const Tensor<S>& a, const Tensor<S>& b);
template <typename S>
Tensor<S> Scale(const Tensor<S>& x, S factor);

// [M x K] * [K x N] -> [M x N].
template <typename S>
Tensor<S> MatMul(const Tensor<S>& a, const Tensor<S>& b);
// [M x K] * [N x K]^T -> [M x N].
template <typename S>
Tensor<S> MatMulTransposed(const Tensor<S>& a, const Tensor<S>& b);
// Adds bias[N] to every row of x[M x N].
template <typename S>
Tensor<S> AddRowBias(const Tensor<S>& x, const Tensor<S>& bias);
// x[M x K] * weight[K x N] + bias[N].
template <typename S>
Tensor<S> Linear(const Tensor<S>& x, const Tensor<S>& weight,
                 const Tensor<S>& bias);

// Numerically stable softmax along `axis` of a tensor of any rank.
template <typename S>
Tensor<S> Softmax(const Tensor<S>& x, size_t axis);

// Normalizes each slice along the last axis to zero mean and unit variance
// (biased variance, `epsilon` added inside the root), then applies
// gain[C] and shift[C].
template <typename S>
Tensor<S> LayerNorm(const Tensor<S>& x, const Tensor<S>& gain,
                    const Tensor<S>& shift, S epsilon);

// Splits F[T x C] into `blocks` contiguous time blocks and takes the max of
// each channel within each block: [blocks x C].
template <typename S>
Tensor<S> MaxPoolBlocks(const Tensor<S>& features, size_t blocks);

// out[t, c] = gamma[b, c] * F[t, c] + beta[b, c] where b is the block of t.
// gamma and beta are [B x C]; B must divide T.
template <typename S>
Tensor<S> AfilmModulate(const Tensor<S>& features, const Tensor<S>& gamma,
                        const Tensor<S>& beta);

// [T x C] -> [T*factor x C/factor] with out[t*factor + p, c] = x[t, c*factor + p].
template <typename S>
Tensor<S> SubpixelShuffle(const Tensor<S>& x, size_t factor);
// Inverse rearrangement of SubpixelShuffle.
template <typename S>
Tensor<S> SubpixelUnshuffle(const Tensor<S>& x, size_t factor);

// Channel-wise concatenation of [T x Ca] and [T x Cb].
template <typename S>
Tensor<S> ConcatColumns(const Tensor<S>& a, const Tensor<S>& b);
// Columns [begin, end) of a rank-2 tensor.
template <typename S>
Tensor<S> SliceColumns(const Tensor<S>& x, size_t begin, size_t end);

// Sum of all elements as a [1] tensor.
template <typename S>
Tensor<S> Sum(const Tensor<S>& x);
// Mean of squared differences as a [1] tensor.
template <typename S>
Tensor<S> MseLoss(const Tensor<S>& prediction, const Tensor<S>& target);

}  // namespace afsr

#endif  // AFSR_OPS_H_
