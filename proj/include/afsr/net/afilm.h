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

#ifndef AFSR_NET_AFILM_H_
#define AFSR_NET_AFILM_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "afsr/tensor.h"

namespace afsr {

template <typename S>
struct NamedTensor {
  std::string name;
  Tensor<S> tensor;
};

// One pre-norm Transformer layer over a [B x C] sequence.
template <typename S>
struct TransformerLayerParams {
  Tensor<S> norm1_gain, norm1_shift;
  Tensor<S> query_weight, query_bias;    // [C x C], [C]
  Tensor<S> key_weight, key_bias;
  Tensor<S> value_weight, value_bias;
  Tensor<S> output_weight, output_bias;
  Tensor<S> norm2_gain, norm2_shift;
  Tensor<S> ffn_in_weight, ffn_in_bias;    // [C x d], [d]
  Tensor<S> ffn_out_weight, ffn_out_bias;  // [d x C], [C]
};

// FiLM generator for a layer with C channels: a stack of Transformer layers
// followed by an affine head C -> 2C whose first C outputs are gamma and
// last C are beta.
template <typename S>
struct AfilmParams {
  size_t channels = 0;
  size_t heads = 1;
  std::vector<TransformerLayerParams<S>> layers;
  Tensor<S> head_weight;  // [C x 2C]
  Tensor<S> head_bias;    // [2C]

  // Glorot-uniform projections, unit gains, zero biases. The head starts at
  // `head_scale` times its Glorot draw with bias (1, ..., 1, 0, ..., 0), so
  // modulation starts close to the identity.
  static AfilmParams Init(size_t channels, size_t heads, size_t layers,
                          size_t ffn_hidden, std::mt19937_64& rng,
                          double head_scale = 0.1);

  // Zero head weights and bias (1, ..., 1, 0, ..., 0): gamma == 1 and
  // beta == 0 exactly, whatever the input.
  void ForceIdentity();

  // Appends every trainable tensor with `prefix` prepended to its name.
  void Collect(const std::string& prefix,
               std::vector<NamedTensor<S>>& out) const;
};

inline constexpr double kLayerNormEpsilon = 1e-5;

// Scaled dot-product self-attention over the rows of x [B x C] with `heads`
// heads of width C / heads, concatenated and passed through the output
// projection.
template <typename S>
Tensor<S> MultiHeadAttention(const Tensor<S>& x,
                             const TransformerLayerParams<S>& p, size_t heads);

// x + MHA(LN(x)), then + FFN(LN(.)) with a ReLU hidden layer.
template <typename S>
Tensor<S> TransformerLayer(const Tensor<S>& x,
                           const TransformerLayerParams<S>& p, size_t heads);

// Runs the layer stack over the pooled [B x C] sequence and returns
// (gamma, beta), each [B x C].
template <typename S>
std::pair<Tensor<S>, Tensor<S>> TransformerBlock(const Tensor<S>& pooled,
                                                 const AfilmParams<S>& p);

// Block max-pool -> TransformerBlock -> per-block affine modulation.
template <typename S>
Tensor<S> AfilmLayer(const Tensor<S>& features, const AfilmParams<S>& p,
                     size_t blocks);

// Glorot-uniform tensor with the given fan-in / fan-out.
template <typename S>
Tensor<S> GlorotUniform(const Shape& shape, size_t fan_in, size_t fan_out,
                        std::mt19937_64& rng, double scale = 1.0);

}  // namespace afsr

#endif  // AFSR_NET_AFILM_H_
