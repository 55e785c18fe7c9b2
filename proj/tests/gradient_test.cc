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

// Central finite-difference checks of every differentiable primitive at
// 64-bit precision, h = 1e-5, over ten seeds each, up to the full model.

#include <functional>
#include <random>
#include <vector>

#include "afsr/net/afilm.h"
#include "afsr/net/model.h"
#include "afsr/ops.h"
#include "doctest.h"
#include "test_util.h"

namespace afsr {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;
using T = Tensor<double>;

constexpr int kSeeds = 10;
constexpr double kTolerance = 1e-4;
constexpr double kKinkStep = 1e-6;
constexpr double kKinkFloor = 1e-4;

// Contracts the output with fixed random weights so every output element
// contributes to the scalar loss.
T Project(const T& out, uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  auto w = RandomTensor<double>(out.shape(), rng);
  return Sum(Mul(out, w));
}

void ExpectGradients(const std::function<T()>& f, std::vector<T> params,
                     uint64_t seed, double h = 1e-5, double floor = 1e-6) {
  std::mt19937_64 rng(seed);
  auto r = CheckGradients(f, std::move(params), rng, 0, h, floor);
  CHECK(r.checked > 0);
  INFO("analytic " << r.worst_analytic << ", numeric " << r.worst_numeric);
  CHECK(r.max_relative_error < kTolerance);
}

TEST_CASE("gradient: conv1d") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({9, 3}, rng, -1, 1, true);
    auto k = RandomTensor<double>({4, 5, 3}, rng, -1, 1, true);
    auto b = RandomTensor<double>({4}, rng, -1, 1, true);
    const size_t stride = 1 + s % 2;
    ExpectGradients([&] { return Project(Conv1d(x, k, b, stride), s); },
                    {x, k, b}, s);
  }
}

TEST_CASE("gradient: relu") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({6, 4}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(Relu(x), s); }, {x}, s);
  }
}

TEST_CASE("gradient: softmax along each axis") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({3, 5}, rng, -2, 2, true);
    const size_t axis = s % 2;
    ExpectGradients([&] { return Project(Softmax(x, axis), s); }, {x}, s);
  }
}

TEST_CASE("gradient: layer norm") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({4, 6}, rng, -2, 2, true);
    auto g = RandomTensor<double>({6}, rng, 0.5, 1.5, true);
    auto b = RandomTensor<double>({6}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(LayerNorm(x, g, b, 1e-5), s); },
                    {x, g, b}, s);
  }
}

TEST_CASE("gradient: matmul, transposed matmul and linear") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto a = RandomTensor<double>({3, 4}, rng, -1, 1, true);
    auto b = RandomTensor<double>({4, 5}, rng, -1, 1, true);
    auto c = RandomTensor<double>({6, 4}, rng, -1, 1, true);
    auto bias = RandomTensor<double>({5}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(MatMul(a, b), s); }, {a, b}, s);
    ExpectGradients([&] { return Project(MatMulTransposed(a, c), s); }, {a, c},
                    s);
    ExpectGradients([&] { return Project(Linear(a, b, bias), s); },
                    {a, b, bias}, s);
  }
}

TEST_CASE("gradient: max pool over blocks") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({12, 3}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(MaxPoolBlocks(x, 4), s); }, {x}, s);
  }
}

TEST_CASE("gradient: afilm modulation") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto f = RandomTensor<double>({8, 3}, rng, -1, 1, true);
    auto g = RandomTensor<double>({4, 3}, rng, -1, 1, true);
    auto b = RandomTensor<double>({4, 3}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(AfilmModulate(f, g, b), s); },
                    {f, g, b}, s);
  }
}

TEST_CASE("gradient: subpixel shuffle, concat and slice") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({4, 6}, rng, -1, 1, true);
    auto y = RandomTensor<double>({12, 2}, rng, -1, 1, true);
    ExpectGradients([&] { return Project(SubpixelShuffle(x, 2), s); }, {x}, s);
    ExpectGradients(
        [&] { return Project(ConcatColumns(SubpixelShuffle(x, 3), y), s); },
        {x, y}, s);
    ExpectGradients([&] { return Project(SliceColumns(x, 1, 4), s); }, {x}, s);
  }
}

TEST_CASE("gradient: elementwise arithmetic, dropout and mse") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto a = RandomTensor<double>({5, 2}, rng, -1, 1, true);
    auto b = RandomTensor<double>({5, 2}, rng, -1, 1, true);
    ExpectGradients(
        [&] { return Project(Mul(Sub(a, b), Add(a, Scale(b, 0.5))), s); },
        {a, b}, s);
    ExpectGradients(
        [&] {
          std::mt19937_64 mask_rng(s);
          return Project(Dropout(a, 0.5, mask_rng, true), s);
        },
        {a}, s);
    ExpectGradients([&] { return MseLoss(a, b); }, {a, b}, s);
  }
}

std::vector<T> LayerTensors(const AfilmParams<double>& p) {
  std::vector<NamedTensor<double>> named;
  p.Collect("", named);
  std::vector<T> out;
  for (auto& n : named) out.push_back(n.tensor);
  return out;
}

TEST_CASE("gradient: multi-head attention") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto p = AfilmParams<double>::Init(8, 2, 1, 6, rng, 1.0);
    auto x = RandomTensor<double>({4, 8}, rng, -1, 1, true);
    const auto& layer = p.layers[0];
    std::vector<T> params = {x,
                             layer.query_weight, layer.query_bias,
                             layer.key_weight, layer.key_bias,
                             layer.value_weight, layer.value_bias,
                             layer.output_weight, layer.output_bias};
    ExpectGradients([&] { return Project(MultiHeadAttention(x, layer, 2), s); },
                    params, s);
  }
}

TEST_CASE("gradient: transformer layer with feed-forward") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto p = AfilmParams<double>::Init(6, 3, 1, 10, rng, 1.0);
    auto x = RandomTensor<double>({5, 6}, rng, -1, 1, true);
    auto params = LayerTensors(p);
    params.push_back(x);
    ExpectGradients(
        [&] { return Project(TransformerLayer(x, p.layers[0], 3), s); },
        params, s);
  }
}

TEST_CASE("gradient: afilm layer") {
  for (uint64_t s = 0; s < kSeeds; ++s) {
    std::mt19937_64 rng(s);
    auto p = AfilmParams<double>::Init(4, 2, 2, 8, rng, 1.0);
    auto f = RandomTensor<double>({12, 4}, rng, -1, 1, true);
    auto params = LayerTensors(p);
    params.push_back(f);
    // Block max-pooling and ReLU put kinks close to the probe points; the
    // smaller step keeps the differences on one side of them, and the raised
    // floor absorbs the eps * |f| / h rounding noise that step brings.
    ExpectGradients([&] { return Project(AfilmLayer(f, p, 3), s); }, params,
                    s, kKinkStep, kKinkFloor);
  }
}

TEST_CASE("gradient: full model at T0 = 512, B = 8") {
  ModelConfig config;
  config.patch_length = 512;
  config.blocks = 8;
  config.filters_log2_offset = 1;
  config.max_filters = 8;
  config.length_log2_offset = 3;
  config.min_filter_length = 3;
  config.final_filter_length = 3;
  config.transformer_layers = 1;
  config.heads = 2;
  config.ffn_hidden = 8;
  for (uint64_t s = 0; s < kSeeds; ++s) {
    AfilmNet<double> model(config, 100 + s);
    std::mt19937_64 rng(s);
    auto x = RandomTensor<double>({512, 1}, rng, -1, 1, true);
    auto target = RandomTensor<double>({512, 1}, rng);
    auto params = model.ParameterTensors();
    params.push_back(x);
    std::mt19937_64 probe(s);
    auto r = CheckGradients(
        [&] { return MseLoss(model.Forward(x, false), target); }, params,
        probe, 4, kKinkStep, kKinkFloor);
    CHECK(r.checked > 4 * model.Parameters().size() / 2);
    INFO("analytic " << r.worst_analytic << ", numeric " << r.worst_numeric);
    CHECK(r.max_relative_error < kTolerance);
  }
}

}  // namespace
}  // namespace afsr
