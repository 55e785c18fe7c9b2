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

#include "afsr/net/config.h"

#include <algorithm>
#include <string>

#include "afsr/error.h"

namespace afsr {
namespace {

int Pow2(int e) { return e <= 0 ? 1 : (1 << e); }

BlockSpec DownLevel(int level, const ModelConfig& c) {
  BlockSpec s;
  s.n_filters = std::min(Pow2(c.filters_log2_offset + level), c.max_filters);
  s.filter_length =
      std::max(Pow2(c.length_log2_offset - level) + 1, c.min_filter_length);
  s.stride = 2;
  return s;
}

void RequirePositive(int value, const char* name) {
  if (value <= 0) {
    throw ParameterError(std::string("model config: ") + name +
                         " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

BlockSpec BlockSpecDown(int k, const ModelConfig& config) {
  if (k < 1 || k > config.depth) {
    throw ParameterError("down block index " + std::to_string(k) +
                         " outside 1.." + std::to_string(config.depth));
  }
  return DownLevel(k, config);
}

BlockSpec BlockSpecBottleneck(const ModelConfig& config) {
  return DownLevel(config.depth + 1, config);
}

BlockSpec BlockSpecUp(int k, const ModelConfig& config) {
  if (k < 1 || k > config.depth) {
    throw ParameterError("up block index " + std::to_string(k) +
                         " outside 1.." + std::to_string(config.depth));
  }
  BlockSpec s = DownLevel(config.depth - k + 1, config);
  s.n_filters *= 2;
  s.stride = 1;
  return s;
}

void ValidateInputLength(const ModelConfig& config, size_t length) {
  const size_t levels = static_cast<size_t>(config.depth) + 1;
  if (length == 0 || length % (size_t{1} << levels) != 0) {
    throw ParameterError("input length " + std::to_string(length) +
                         " is not divisible by 2^(K+1) = " +
                         std::to_string(size_t{1} << levels));
  }
  if (!config.afilm_enabled) return;
  for (size_t level = 1; level <= levels; ++level) {
    const size_t steps = length >> level;
    if (steps % static_cast<size_t>(config.blocks) != 0) {
      throw ParameterError("AFiLM block count B=" +
                           std::to_string(config.blocks) +
                           " does not divide length " + std::to_string(steps) +
                           " at level " + std::to_string(level));
    }
  }
}

void ValidateConfig(const ModelConfig& c) {
  RequirePositive(c.depth, "depth");
  RequirePositive(c.blocks, "blocks");
  RequirePositive(c.upscale, "upscale");
  RequirePositive(c.patch_length, "patch_length");
  RequirePositive(c.max_filters, "max_filters");
  RequirePositive(c.min_filter_length, "min_filter_length");
  RequirePositive(c.final_filter_length, "final_filter_length");
  if (c.depth > 12) throw ParameterError("model config: depth above 12");
  if (c.filters_log2_offset < 0 || c.filters_log2_offset > 16 ||
      c.length_log2_offset < 0 || c.length_log2_offset > 16) {
    throw ParameterError("model config: schedule offsets must lie in 0..16");
  }
  if (c.min_filter_length % 2 == 0 || c.final_filter_length % 2 == 0) {
    throw ParameterError("model config: filter lengths must be odd");
  }
  if (!(c.dropout_rate >= 0.0f && c.dropout_rate < 1.0f)) {
    throw ParameterError("model config: dropout_rate must lie in [0, 1)");
  }
  if (c.afilm_enabled) {
    RequirePositive(c.transformer_layers, "transformer_layers");
    RequirePositive(c.heads, "heads");
    RequirePositive(c.ffn_hidden, "ffn_hidden");
  }
  for (int level = 1; level <= c.depth + 1; ++level) {
    const BlockSpec s = DownLevel(level, c);
    if (s.filter_length % 2 == 0) {
      throw ParameterError("model config: even filter length " +
                           std::to_string(s.filter_length) + " at level " +
                           std::to_string(level));
    }
    if (c.afilm_enabled && s.n_filters % c.heads != 0) {
      throw ParameterError("model config: heads h=" + std::to_string(c.heads) +
                           " does not divide " + std::to_string(s.n_filters) +
                           " channels at level " + std::to_string(level));
    }
  }
  ValidateInputLength(c, static_cast<size_t>(c.patch_length));
}

}  // namespace afsr
