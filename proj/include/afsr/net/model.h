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

#ifndef AFSR_NET_MODEL_H_
#define AFSR_NET_MODEL_H_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "afsr/net/afilm.h"
#include "afsr/net/config.h"
#include "afsr/tensor.h"

namespace afsr {

template <typename S>
struct ConvParams {
  Tensor<S> weight;  // [Cout x width x Cin]
  Tensor<S> bias;    // [Cout]
};

template <typename S>
struct NetBlock {
  BlockSpec spec;
  ConvParams<S> conv;
  std::optional<AfilmParams<S>> afilm;  // absent in the plain U-Net
};

// U-Net over a [T x 1] waveform with AFiLM modulation after every block.
//
//   down k = 1..K   conv(stride 2) -> ReLU -> AFiLM
//   bottleneck      conv(stride 2) -> dropout -> ReLU -> AFiLM
//   up k = 1..K     conv(stride 1, 2n filters) -> ReLU -> shuffle(2) -> AFiLM
//                   -> concat with down block K - k + 1
//   final           conv to 2 channels -> shuffle(2) -> + input
template <typename S>
class AfilmNet {
 public:
  // Glorot-uniform convolution kernels and zero biases; AFiLM generators
  // from AfilmParams::Init. Everything is drawn from one stream seeded with
  // `seed`.
  AfilmNet(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }

  // `input` is [T x 1] with T valid for the config. `dropout_rng` is only
  // consumed when `training` is set and may then not be null.
  Tensor<S> Forward(const Tensor<S>& input, bool training,
                    std::mt19937_64* dropout_rng = nullptr) const;

  // Evaluation-mode forward on raw samples.
  std::vector<S> Predict(const std::vector<S>& samples) const;

  // Every trainable tensor in a fixed order. The tensors are handles onto
  // the model's storage, so writing through them edits the model.
  std::vector<NamedTensor<S>> Parameters() const;
  std::vector<Tensor<S>> ParameterTensors() const;

  // Sets every AFiLM head to gamma == 1, beta == 0.
  void ForceIdentityModulation();

  // The same convolution weights (shared, not copied) with every AFiLM
  // layer removed.
  AfilmNet WithoutAfilm() const;

  const std::vector<NetBlock<S>>& down() const { return down_; }
  const NetBlock<S>& bottleneck() const { return bottleneck_; }
  const std::vector<NetBlock<S>>& up() const { return up_; }
  const ConvParams<S>& final_conv() const { return final_; }

 private:
  AfilmNet() = default;

  Tensor<S> Modulate(const Tensor<S>& x, const NetBlock<S>& block) const;

  ModelConfig config_;
  std::vector<NetBlock<S>> down_;
  NetBlock<S> bottleneck_;
  std::vector<NetBlock<S>> up_;
  ConvParams<S> final_;
};

template <typename S>
size_t CountParameters(const std::vector<NamedTensor<S>>& params);

template <typename S>
size_t CountParameters(const AfilmNet<S>& model) {
  return CountParameters(model.Parameters());
}

extern template class AfilmNet<float>;
extern template class AfilmNet<double>;

}  // namespace afsr

#endif  // AFSR_NET_MODEL_H_
