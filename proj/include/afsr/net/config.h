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

#ifndef AFSR_NET_CONFIG_H_
#define AFSR_NET_CONFIG_H_

#include <cstddef>

namespace afsr {

// Architecture hyperparameters. Defaults give the full-size model; the
// width-schedule fields exist so that the same topology can be trained or
// gradient-checked at reduced width.
struct ModelConfig {
  int depth = 4;                 // K: downsampling (and upsampling) blocks
  int blocks = 32;               // B: time blocks per AFiLM layer
  int transformer_layers = 4;
  int heads = 8;
  int ffn_hidden = 2048;
  float dropout_rate = 0.5f;     // bottleneck only
  int upscale = 2;               // r, the ratio the model was trained for
  int patch_length = 8192;       // T0

  // Down block k has min(2^(filters_log2_offset + k), max_filters) filters
  // of length max(2^(length_log2_offset - k) + 1, min_filter_length).
  int filters_log2_offset = 6;
  int max_filters = 512;
  int length_log2_offset = 7;
  int min_filter_length = 9;
  int final_filter_length = 9;

  // false builds the plain convolutional U-Net with no AFiLM layers.
  bool afilm_enabled = true;

  bool operator==(const ModelConfig&) const = default;
};

struct BlockSpec {
  int n_filters = 0;
  int filter_length = 0;
  int stride = 1;

  bool operator==(const BlockSpec&) const = default;
};

// Down block k in 1..K: stride 2.
BlockSpec BlockSpecDown(int k, const ModelConfig& config);
// Bottleneck: the down-block schedule continued to level K + 1.
BlockSpec BlockSpecBottleneck(const ModelConfig& config);
// Up block k in 1..K mirrors down block j = K - k + 1 with doubled filters
// (halved again by the subpixel shuffle) and stride 1.
BlockSpec BlockSpecUp(int k, const ModelConfig& config);

// Checks every structural constraint (positivity, odd filter lengths, head
// divisibility, T0 divisible by 2^(K+1), B dividing the length at every
// AFiLM level). Throws ParameterError naming the failing field or level.
void ValidateConfig(const ModelConfig& config);

// Same length checks for an input of `length` samples.
void ValidateInputLength(const ModelConfig& config, size_t length);

}  // namespace afsr

#endif  // AFSR_NET_CONFIG_H_
