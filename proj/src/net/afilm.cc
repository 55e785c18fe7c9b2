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

#include "afsr/net/afilm.h"

#include <algorithm>
#include <cmath>

#include "afsr/error.h"
#include "afsr/ops.h"

namespace afsr {

template <typename S>
Tensor<S> GlorotUniform(const Shape& shape, size_t fan_in, size_t fan_out,
                        std::mt19937_64& rng, double scale) {
  const double limit = scale * std::sqrt(6.0 / double(fan_in + fan_out));
  std::vector<S> values(NumElements(shape));
  for (S& v : values) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = S((2.0 * u - 1.0) * limit);
  }
  return Tensor<S>::FromData(shape, std::move(values), true);
}

template <typename S>
AfilmParams<S> AfilmParams<S>::Init(size_t channels, size_t heads,
                                    size_t layers, size_t ffn_hidden,
                                    std::mt19937_64& rng, double head_scale) {
  const size_t c = channels, d = ffn_hidden;
  auto zeros = [](size_t n) { return Tensor<S>::Zeros({n}, true); };
  auto ones = [](size_t n) { return Tensor<S>::Full({n}, S(1), true); };
  AfilmParams p;
  p.channels = c;
  p.heads = heads;
  for (size_t l = 0; l < layers; ++l) {
    TransformerLayerParams<S> t;
    t.norm1_gain = ones(c);
    t.norm1_shift = zeros(c);
    t.query_weight = GlorotUniform<S>({c, c}, c, c, rng);
    t.query_bias = zeros(c);
    t.key_weight = GlorotUniform<S>({c, c}, c, c, rng);
    t.key_bias = zeros(c);
    t.value_weight = GlorotUniform<S>({c, c}, c, c, rng);
    t.value_bias = zeros(c);
    t.output_weight = GlorotUniform<S>({c, c}, c, c, rng);
    t.output_bias = zeros(c);
    t.norm2_gain = ones(c);
    t.norm2_shift = zeros(c);
    t.ffn_in_weight = GlorotUniform<S>({c, d}, c, d, rng);
    t.ffn_in_bias = zeros(d);
    t.ffn_out_weight = GlorotUniform<S>({d, c}, d, c, rng);
    t.ffn_out_bias = zeros(c);
    p.layers.push_back(std::move(t));
  }
  p.head_weight = GlorotUniform<S>({c, 2 * c}, c, 2 * c, rng, head_scale);
  std::vector<S> bias(2 * c, S(0));
  std::fill(bias.begin(), bias.begin() + c, S(1));
  p.head_bias = Tensor<S>::FromData({2 * c}, std::move(bias), true);
  return p;
}

template <typename S>
void AfilmParams<S>::ForceIdentity() {
  for (S& v : head_weight.data()) v = S(0);
  auto bias = head_bias.data();
  for (size_t i = 0; i < bias.size(); ++i) bias[i] = i < channels ? S(1) : S(0);
}

template <typename S>
void AfilmParams<S>::Collect(const std::string& prefix,
                             std::vector<NamedTensor<S>>& out) const {
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& t = layers[l];
    const std::string p = prefix + "layer" + std::to_string(l) + ".";
    out.push_back({p + "norm1.gain", t.norm1_gain});
    out.push_back({p + "norm1.shift", t.norm1_shift});
    out.push_back({p + "attention.query.weight", t.query_weight});
    out.push_back({p + "attention.query.bias", t.query_bias});
    out.push_back({p + "attention.key.weight", t.key_weight});
    out.push_back({p + "attention.key.bias", t.key_bias});
    out.push_back({p + "attention.value.weight", t.value_weight});
    out.push_back({p + "attention.value.bias", t.value_bias});
    out.push_back({p + "attention.output.weight", t.output_weight});
    out.push_back({p + "attention.output.bias", t.output_bias});
    out.push_back({p + "norm2.gain", t.norm2_gain});
    out.push_back({p + "norm2.shift", t.norm2_shift});
    out.push_back({p + "ffn.in.weight", t.ffn_in_weight});
    out.push_back({p + "ffn.in.bias", t.ffn_in_bias});
    out.push_back({p + "ffn.out.weight", t.ffn_out_weight});
    out.push_back({p + "ffn.out.bias", t.ffn_out_bias});
  }
  out.push_back({prefix + "head.weight", head_weight});
  out.push_back({prefix + "head.bias", head_bias});
}

template <typename S>
Tensor<S> MultiHeadAttention(const Tensor<S>& x,
                             const TransformerLayerParams<S>& p,
                             size_t heads) {
  const size_t c = x.dim(1);
  if (heads == 0 || c % heads != 0) {
    throw ParameterError("attention: " + std::to_string(heads) +
                         " heads do not divide " + std::to_string(c) +
                         " channels");
  }
  const size_t width = c / heads;
  const S scale = S(1) / std::sqrt(S(width));
  const Tensor<S> q = Linear(x, p.query_weight, p.query_bias);
  const Tensor<S> k = Linear(x, p.key_weight, p.key_bias);
  const Tensor<S> v = Linear(x, p.value_weight, p.value_bias);
  Tensor<S> merged;
  for (size_t h = 0; h < heads; ++h) {
    const size_t lo = h * width, hi = lo + width;
    const Tensor<S> qh = heads == 1 ? q : SliceColumns(q, lo, hi);
    const Tensor<S> kh = heads == 1 ? k : SliceColumns(k, lo, hi);
    const Tensor<S> vh = heads == 1 ? v : SliceColumns(v, lo, hi);
    const Tensor<S> weights = Softmax(Scale(MatMulTransposed(qh, kh), scale), 1);
    const Tensor<S> out = MatMul(weights, vh);
    merged = merged.defined() ? ConcatColumns(merged, out) : out;
  }
  return Linear(merged, p.output_weight, p.output_bias);
}

template <typename S>
Tensor<S> TransformerLayer(const Tensor<S>& x,
                           const TransformerLayerParams<S>& p, size_t heads) {
  const S eps = S(kLayerNormEpsilon);
  Tensor<S> h = Add(x, MultiHeadAttention(
                           LayerNorm(x, p.norm1_gain, p.norm1_shift, eps), p,
                           heads));
  const Tensor<S> n = LayerNorm(h, p.norm2_gain, p.norm2_shift, eps);
  const Tensor<S> ffn = Linear(Relu(Linear(n, p.ffn_in_weight, p.ffn_in_bias)),
                               p.ffn_out_weight, p.ffn_out_bias);
  return Add(h, ffn);
}

template <typename S>
std::pair<Tensor<S>, Tensor<S>> TransformerBlock(const Tensor<S>& pooled,
                                                 const AfilmParams<S>& p) {
  if (pooled.rank() != 2 || pooled.dim(1) != p.channels) {
    throw DimensionError("transformer block: expected [B x " +
                         std::to_string(p.channels) + "] input, got " +
                         ShapeToString(pooled.shape()));
  }
  Tensor<S> h = pooled;
  for (const auto& layer : p.layers) h = TransformerLayer(h, layer, p.heads);
  const Tensor<S> out = Linear(h, p.head_weight, p.head_bias);
  return {SliceColumns(out, 0, p.channels),
          SliceColumns(out, p.channels, 2 * p.channels)};
}

template <typename S>
Tensor<S> AfilmLayer(const Tensor<S>& features, const AfilmParams<S>& p,
                     size_t blocks) {
  const Tensor<S> pooled = MaxPoolBlocks(features, blocks);
  auto [gamma, beta] = TransformerBlock(pooled, p);
  return AfilmModulate(features, gamma, beta);
}

#define AFSR_INSTANTIATE_AFILM(S)                                              \
  template struct AfilmParams<S>;                                              \
  template Tensor<S> GlorotUniform<S>(const Shape&, size_t, size_t,            \
                                      std::mt19937_64&, double);               \
  template Tensor<S> MultiHeadAttention<S>(                                    \
      const Tensor<S>&, const TransformerLayerParams<S>&, size_t);             \
  template Tensor<S> TransformerLayer<S>(                                      \
      const Tensor<S>&, const TransformerLayerParams<S>&, size_t);             \
  template std::pair<Tensor<S>, Tensor<S>> TransformerBlock<S>(                \
      const Tensor<S>&, const AfilmParams<S>&);                                \
  template Tensor<S> AfilmLayer<S>(const Tensor<S>&, const AfilmParams<S>&,    \
                                   size_t);

AFSR_INSTANTIATE_AFILM(float)
AFSR_INSTANTIATE_AFILM(double)

#undef AFSR_INSTANTIATE_AFILM

}  // namespace afsr
