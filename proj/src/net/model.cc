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

#include "afsr/net/model.h"

#include <string>
#include <utility>

#include "afsr/error.h"
#include "afsr/ops.h"

namespace afsr {
namespace {

template <typename S>
ConvParams<S> InitConv(size_t out, size_t width, size_t in,
                       std::mt19937_64& rng) {
  ConvParams<S> p;
  p.weight = GlorotUniform<S>({out, width, in}, width * in, width * out, rng);
  p.bias = Tensor<S>::Zeros({out}, true);
  return p;
}

template <typename S>
NetBlock<S> InitBlock(const BlockSpec& spec, size_t in_channels,
                      size_t afilm_channels, const ModelConfig& config,
                      std::mt19937_64& rng) {
  NetBlock<S> block;
  block.spec = spec;
  block.conv = InitConv<S>(size_t(spec.n_filters), size_t(spec.filter_length),
                           in_channels, rng);
  if (config.afilm_enabled) {
    block.afilm = AfilmParams<S>::Init(
        afilm_channels, size_t(config.heads),
        size_t(config.transformer_layers), size_t(config.ffn_hidden), rng);
  }
  return block;
}

template <typename S>
void CollectBlock(const std::string& prefix, const NetBlock<S>& block,
                  std::vector<NamedTensor<S>>& out) {
  out.push_back({prefix + "conv.weight", block.conv.weight});
  out.push_back({prefix + "conv.bias", block.conv.bias});
  if (block.afilm) block.afilm->Collect(prefix + "afilm.", out);
}

}  // namespace

template <typename S>
AfilmNet<S>::AfilmNet(const ModelConfig& config, uint64_t seed)
    : config_(config) {
  ValidateConfig(config);
  std::mt19937_64 rng(seed);
  const int depth = config.depth;
  size_t channels = 1;
  for (int k = 1; k <= depth; ++k) {
    const BlockSpec spec = BlockSpecDown(k, config);
    down_.push_back(InitBlock<S>(spec, channels, size_t(spec.n_filters),
                                 config, rng));
    channels = size_t(spec.n_filters);
  }
  {
    const BlockSpec spec = BlockSpecBottleneck(config);
    bottleneck_ = InitBlock<S>(spec, channels, size_t(spec.n_filters), config,
                               rng);
    channels = size_t(spec.n_filters);
  }
  for (int k = 1; k <= depth; ++k) {
    const BlockSpec spec = BlockSpecUp(k, config);
    const size_t shuffled = size_t(spec.n_filters) / 2;
    up_.push_back(InitBlock<S>(spec, channels, shuffled, config, rng));
    const size_t skip = size_t(down_[size_t(depth - k)].spec.n_filters);
    channels = shuffled + skip;
  }
  final_ = InitConv<S>(2, size_t(config.final_filter_length), channels, rng);
}

template <typename S>
Tensor<S> AfilmNet<S>::Modulate(const Tensor<S>& x,
                                const NetBlock<S>& block) const {
  if (!block.afilm) return x;
  return AfilmLayer(x, *block.afilm, size_t(config_.blocks));
}

template <typename S>
Tensor<S> AfilmNet<S>::Forward(const Tensor<S>& input, bool training,
                               std::mt19937_64* dropout_rng) const {
  if (input.rank() != 2 || input.dim(1) != 1) {
    throw DimensionError("model input must be [T x 1], got " +
                         ShapeToString(input.shape()));
  }
  ValidateInputLength(config_, input.dim(0));
  if (training && dropout_rng == nullptr) {
    throw ParameterError("training forward needs a dropout generator");
  }

  std::vector<Tensor<S>> skips;
  Tensor<S> h = input;
  for (const auto& block : down_) {
    h = Relu(Conv1d(h, block.conv.weight, block.conv.bias, 2));
    h = Modulate(h, block);
    skips.push_back(h);
  }

  h = Conv1d(h, bottleneck_.conv.weight, bottleneck_.conv.bias, 2);
  if (training) {
    h = Dropout(h, config_.dropout_rate, *dropout_rng, true);
  }
  h = Modulate(Relu(h), bottleneck_);

  for (size_t k = 0; k < up_.size(); ++k) {
    const auto& block = up_[k];
    h = Relu(Conv1d(h, block.conv.weight, block.conv.bias, 1));
    h = Modulate(SubpixelShuffle(h, 2), block);
    h = ConcatColumns(h, skips[skips.size() - 1 - k]);
  }

  h = SubpixelShuffle(Conv1d(h, final_.weight, final_.bias, 1), 2);
  return Add(h, input);
}

template <typename S>
std::vector<S> AfilmNet<S>::Predict(const std::vector<S>& samples) const {
  NoGradGuard no_grad;
  const Tensor<S> x = Tensor<S>::FromData({samples.size(), 1}, samples);
  const Tensor<S> y = Forward(x, false);
  auto d = y.data();
  return std::vector<S>(d.begin(), d.end());
}

template <typename S>
std::vector<NamedTensor<S>> AfilmNet<S>::Parameters() const {
  std::vector<NamedTensor<S>> out;
  for (size_t k = 0; k < down_.size(); ++k) {
    CollectBlock("down" + std::to_string(k + 1) + ".", down_[k], out);
  }
  CollectBlock(std::string("bottleneck."), bottleneck_, out);
  for (size_t k = 0; k < up_.size(); ++k) {
    CollectBlock("up" + std::to_string(k + 1) + ".", up_[k], out);
  }
  out.push_back({"final.conv.weight", final_.weight});
  out.push_back({"final.conv.bias", final_.bias});
  return out;
}

template <typename S>
std::vector<Tensor<S>> AfilmNet<S>::ParameterTensors() const {
  std::vector<Tensor<S>> out;
  for (auto& p : Parameters()) out.push_back(p.tensor);
  return out;
}

template <typename S>
void AfilmNet<S>::ForceIdentityModulation() {
  auto force = [](NetBlock<S>& b) {
    if (b.afilm) b.afilm->ForceIdentity();
  };
  for (auto& b : down_) force(b);
  force(bottleneck_);
  for (auto& b : up_) force(b);
}

template <typename S>
AfilmNet<S> AfilmNet<S>::WithoutAfilm() const {
  AfilmNet plain = *this;
  plain.config_.afilm_enabled = false;
  for (auto& b : plain.down_) b.afilm.reset();
  plain.bottleneck_.afilm.reset();
  for (auto& b : plain.up_) b.afilm.reset();
  return plain;
}

template <typename S>
size_t CountParameters(const std::vector<NamedTensor<S>>& params) {
  size_t total = 0;
  for (const auto& p : params) total += p.tensor.numel();
  return total;
}

template class AfilmNet<float>;
template class AfilmNet<double>;
template size_t CountParameters<float>(const std::vector<NamedTensor<float>>&);
template size_t CountParameters<double>(
    const std::vector<NamedTensor<double>>&);

}  // namespace afsr
