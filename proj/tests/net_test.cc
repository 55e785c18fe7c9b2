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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "afsr/error.h"
#include "afsr/net/afilm.h"
#include "afsr/net/config.h"
#include "afsr/net/model.h"
#include "afsr/ops.h"
#include "doctest.h"
#include "test_util.h"

namespace afsr {
namespace {

using testing::RandomTensor;
using T = Tensor<double>;
using Matrix = std::vector<std::vector<double>>;

Matrix ToMatrix(const T& t) {
  Matrix m(t.dim(0), std::vector<double>(t.dim(1)));
  for (size_t r = 0; r < t.dim(0); ++r) {
    for (size_t c = 0; c < t.dim(1); ++c) m[r][c] = t.at(r, c);
  }
  return m;
}

template <typename S>
std::vector<S> ToVector(const Tensor<S>& t) {
  auto d = t.data();
  return {d.begin(), d.end()};
}

// x W + b with W stored [in x out].
Matrix Affine(const Matrix& x, const T& w, const T& b) {
  Matrix out(x.size(), std::vector<double>(w.dim(1)));
  for (size_t r = 0; r < x.size(); ++r) {
    for (size_t j = 0; j < w.dim(1); ++j) {
      double acc = b.data()[j];
      for (size_t i = 0; i < w.dim(0); ++i) acc += x[r][i] * w.at(i, j);
      out[r][j] = acc;
    }
  }
  return out;
}

Matrix AttentionOracle(const Matrix& x, const TransformerLayerParams<double>& p,
                       size_t heads) {
  const Matrix q = Affine(x, p.query_weight, p.query_bias);
  const Matrix k = Affine(x, p.key_weight, p.key_bias);
  const Matrix v = Affine(x, p.value_weight, p.value_bias);
  const size_t n = x.size(), c = x[0].size(), w = c / heads;
  Matrix merged(n, std::vector<double>(c, 0.0));
  for (size_t h = 0; h < heads; ++h) {
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> score(n);
      for (size_t j = 0; j < n; ++j) {
        double dot = 0;
        for (size_t e = 0; e < w; ++e) dot += q[i][h * w + e] * k[j][h * w + e];
        score[j] = dot / std::sqrt(double(w));
      }
      const double top = *std::max_element(score.begin(), score.end());
      double z = 0;
      for (double& s : score) z += (s = std::exp(s - top));
      for (size_t j = 0; j < n; ++j) {
        for (size_t e = 0; e < w; ++e) {
          merged[i][h * w + e] += score[j] / z * v[j][h * w + e];
        }
      }
    }
  }
  return Affine(merged, p.output_weight, p.output_bias);
}

Matrix LayerNormOracle(const Matrix& x, const T& gain, const T& shift) {
  Matrix out = x;
  for (size_t r = 0; r < x.size(); ++r) {
    const double n = double(x[r].size());
    double mean = 0, var = 0;
    for (double v : x[r]) mean += v / n;
    for (double v : x[r]) var += (v - mean) * (v - mean) / n;
    for (size_t c = 0; c < x[r].size(); ++c) {
      out[r][c] = (x[r][c] - mean) / std::sqrt(var + kLayerNormEpsilon) *
                      gain.data()[c] +
                  shift.data()[c];
    }
  }
  return out;
}

Matrix AddMatrix(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (size_t r = 0; r < a.size(); ++r) {
    for (size_t c = 0; c < a[r].size(); ++c) out[r][c] += b[r][c];
  }
  return out;
}

void ExpectNear(const Matrix& expected, const T& actual, double tol) {
  REQUIRE(actual.dim(0) == expected.size());
  REQUIRE(actual.dim(1) == expected[0].size());
  for (size_t r = 0; r < expected.size(); ++r) {
    for (size_t c = 0; c < expected[r].size(); ++c) {
      CHECK(std::abs(actual.at(r, c) - expected[r][c]) <= tol);
    }
  }
}

ModelConfig SmallConfig() {
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
  return config;
}

TEST_CASE("block specs follow the width schedule") {
  const ModelConfig config;
  CHECK(BlockSpecDown(1, config) == BlockSpec{128, 65, 2});
  CHECK(BlockSpecDown(2, config) == BlockSpec{256, 33, 2});
  CHECK(BlockSpecDown(3, config) == BlockSpec{512, 17, 2});
  CHECK(BlockSpecDown(4, config) == BlockSpec{512, 9, 2});
  CHECK(BlockSpecBottleneck(config) == BlockSpec{512, 9, 2});
  CHECK(BlockSpecUp(1, config) == BlockSpec{1024, 9, 1});
  CHECK(BlockSpecUp(4, config) == BlockSpec{256, 65, 1});
  for (int k = 1; k <= config.depth; ++k) {
    CHECK(BlockSpecUp(k, config).n_filters / 2 ==
          BlockSpecDown(config.depth - k + 1, config).n_filters);
  }
  CHECK_THROWS_AS(BlockSpecDown(0, config), ParameterError);
  CHECK_THROWS_AS(BlockSpecDown(5, config), ParameterError);
  CHECK_THROWS_AS(BlockSpecUp(5, config), ParameterError);
}

TEST_CASE("config validation names the failing level") {
  ModelConfig config;
  CHECK_NOTHROW(ValidateConfig(config));
  config.blocks = 48;
  CHECK_THROWS_AS(ValidateConfig(config), ParameterError);
  config = ModelConfig{};
  config.heads = 3;
  CHECK_THROWS_AS(ValidateConfig(config), ParameterError);
  config = ModelConfig{};
  CHECK_THROWS_AS(ValidateInputLength(config, 8200), ParameterError);
  try {
    ValidateInputLength(config, 8192 + 32);
    FAIL("expected a length error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("level") != std::string::npos);
  }
}

TEST_CASE("parameter counting") {
  CHECK(CountParameters(std::vector<NamedTensor<float>>{}) == 0);
  std::vector<NamedTensor<float>> conv = {
      {"w", Tensor<float>::Zeros({128, 65, 1})},
      {"b", Tensor<float>::Zeros({128})}};
  CHECK(CountParameters(conv) == 8448);

  AfilmNet<float> model(ModelConfig{}, 1);
  const double count = double(CountParameters(model));
  CHECK(count > 0.8 * 1.34e8);
  CHECK(count < 1.2 * 1.34e8);
}

TEST_CASE("multi-head attention matches a per-head loop") {
  for (uint64_t s = 0; s < 5; ++s) {
    std::mt19937_64 rng(s);
    auto p = AfilmParams<double>::Init(8, 2, 1, 4, rng, 1.0);
    for (auto* b : {&p.layers[0].query_bias, &p.layers[0].key_bias,
                    &p.layers[0].value_bias, &p.layers[0].output_bias}) {
      *b = RandomTensor<double>({8}, rng);
    }
    auto x = RandomTensor<double>({4, 8}, rng);
    ExpectNear(AttentionOracle(ToMatrix(x), p.layers[0], 2),
               MultiHeadAttention(x, p.layers[0], 2), 1e-6);
  }
}

TEST_CASE("attention over a single block or identical rows") {
  std::mt19937_64 rng(3);
  auto p = AfilmParams<double>::Init(4, 2, 1, 4, rng, 1.0);
  const auto& layer = p.layers[0];
  auto x = RandomTensor<double>({1, 4}, rng);
  const T chain = Linear(Linear(x, layer.value_weight, layer.value_bias),
                         layer.output_weight, layer.output_bias);
  ExpectNear(ToMatrix(chain), MultiHeadAttention(x, layer, 2), 1e-12);

  std::vector<double> row = {0.3, -0.7, 1.1, 0.2};
  std::vector<double> rows;
  for (int i = 0; i < 3; ++i) rows.insert(rows.end(), row.begin(), row.end());
  const T out = MultiHeadAttention(T::FromData({3, 4}, rows), layer, 2);
  for (size_t c = 0; c < 4; ++c) {
    CHECK(out.at(1, c) == out.at(0, c));
    CHECK(out.at(2, c) == out.at(0, c));
  }
  CHECK_THROWS_AS(MultiHeadAttention(x, layer, 3), ParameterError);
}

TEST_CASE("transformer block matches a straight-line transcription") {
  std::mt19937_64 rng(11);
  auto p = AfilmParams<double>::Init(4, 1, 1, 6, rng, 1.0);
  auto& l = p.layers[0];
  for (auto* t : {&l.norm1_gain, &l.norm1_shift, &l.norm2_gain,
                  &l.norm2_shift, &l.query_bias, &l.key_bias, &l.value_bias,
                  &l.output_bias, &l.ffn_out_bias}) {
    *t = RandomTensor<double>({4}, rng);
  }
  l.ffn_in_bias = RandomTensor<double>({6}, rng);
  p.head_bias = RandomTensor<double>({8}, rng);
  auto x = RandomTensor<double>({2, 4}, rng);

  const Matrix in = ToMatrix(x);
  const Matrix h = AddMatrix(
      in, AttentionOracle(LayerNormOracle(in, l.norm1_gain, l.norm1_shift), l,
                          1));
  Matrix hidden = Affine(LayerNormOracle(h, l.norm2_gain, l.norm2_shift),
                         l.ffn_in_weight, l.ffn_in_bias);
  for (auto& r : hidden) {
    for (double& v : r) v = std::max(v, 0.0);
  }
  const Matrix y =
      AddMatrix(h, Affine(hidden, l.ffn_out_weight, l.ffn_out_bias));
  const Matrix head = Affine(y, p.head_weight, p.head_bias);
  Matrix gamma(2), beta(2);
  for (size_t r = 0; r < 2; ++r) {
    gamma[r].assign(head[r].begin(), head[r].begin() + 4);
    beta[r].assign(head[r].begin() + 4, head[r].end());
  }
  auto [g, b] = TransformerBlock(x, p);
  ExpectNear(gamma, g, 1e-12);
  ExpectNear(beta, b, 1e-12);
}

TEST_CASE("identity-forcing head and permutation equivariance") {
  std::mt19937_64 rng(5);
  auto p = AfilmParams<double>::Init(8, 4, 2, 16, rng);
  auto x = RandomTensor<double>({6, 8}, rng);

  auto [g, b] = TransformerBlock(x, p);
  const std::vector<size_t> perm = {3, 0, 5, 1, 4, 2};
  std::vector<double> permuted;
  for (size_t i : perm) {
    for (size_t c = 0; c < 8; ++c) permuted.push_back(x.at(i, c));
  }
  auto [gp, bp] = TransformerBlock(T::FromData({6, 8}, permuted), p);
  for (size_t r = 0; r < 6; ++r) {
    for (size_t c = 0; c < 8; ++c) {
      CHECK(std::abs(gp.at(r, c) - g.at(perm[r], c)) < 1e-12);
      CHECK(std::abs(bp.at(r, c) - b.at(perm[r], c)) < 1e-12);
    }
  }

  p.ForceIdentity();
  auto [gi, bi] = TransformerBlock(x, p);
  for (double v : gi.data()) CHECK(v == 1.0);
  for (double v : bi.data()) CHECK(v == 0.0);
  auto f = RandomTensor<double>({24, 8}, rng);
  CHECK(ToVector(AfilmLayer(f, p, 6)) == ToVector(f));
}

TEST_CASE("afilm modulation") {
  const T f = T::FromData({4, 1}, {1, 2, 3, 4});
  const T out = AfilmModulate(f, T::FromData({2, 1}, {2, 3}),
                              T::FromData({2, 1}, {10, 20}));
  CHECK(ToVector(out) == std::vector<double>{12, 14, 29, 32});

  std::mt19937_64 rng(2);
  auto x = RandomTensor<double>({6, 2}, rng);
  auto beta = RandomTensor<double>({3, 2}, rng);
  const T zeroed = AfilmModulate(x, T::Zeros({3, 2}), beta);
  for (size_t t = 0; t < 6; ++t) {
    for (size_t c = 0; c < 2; ++c) CHECK(zeroed.at(t, c) == beta.at(t / 2, c));
  }
  CHECK_THROWS_AS(AfilmModulate(x, T::Zeros({4, 2}), T::Zeros({4, 2})),
                  DimensionError);
}

TEST_CASE("afilm layer composes pooling, generator and modulation") {
  std::mt19937_64 rng(9);
  auto p = AfilmParams<double>::Init(4, 2, 1, 8, rng, 1.0);
  auto f = RandomTensor<double>({12, 4}, rng);

  std::vector<double> pooled(3 * 4, -INFINITY);
  for (size_t t = 0; t < 12; ++t) {
    for (size_t c = 0; c < 4; ++c) {
      pooled[t / 4 * 4 + c] = std::max(pooled[t / 4 * 4 + c], f.at(t, c));
    }
  }
  auto [g, b] = TransformerBlock(T::FromData({3, 4}, pooled), p);
  const T out = AfilmLayer(f, p, 3);
  for (size_t t = 0; t < 12; ++t) {
    for (size_t c = 0; c < 4; ++c) {
      CHECK(out.at(t, c) == g.at(t / 4, c) * f.at(t, c) + b.at(t / 4, c));
    }
  }

  auto positive = RandomTensor<double>({12, 4}, rng, 0.1, 1.0);
  const T base = MaxPoolBlocks(positive, 3);
  const T scaled = MaxPoolBlocks(Scale(positive, 2.5), 3);
  for (size_t i = 0; i < base.numel(); ++i) {
    CHECK(scaled.data()[i] == doctest::Approx(2.5 * base.data()[i]));
  }
}

TEST_CASE("model preserves the input shape") {
  ModelConfig config = SmallConfig();
  for (int length : {512, 8192}) {
    config.patch_length = length;
    config.blocks = length == 512 ? 8 : 32;
    AfilmNet<float> model(config, 4);
    std::mt19937_64 rng(1);
    auto x = RandomTensor<float>({size_t(length), 1}, rng);
    const auto y = model.Forward(x, false);
    CHECK(y.shape() == x.shape());
  }
  AfilmNet<float> model(SmallConfig(), 4);
  CHECK_THROWS_AS(model.Forward(Tensor<float>::Zeros({500, 1}), false),
                  ParameterError);
  CHECK_THROWS_AS(model.Forward(Tensor<float>::Zeros({512, 2}), false),
                  DimensionError);
}

TEST_CASE("zero weights leave only the global skip") {
  AfilmNet<double> model(SmallConfig(), 8);
  for (auto& p : model.Parameters()) {
    for (double& v : p.tensor.data()) v = 0.0;
  }
  std::mt19937_64 rng(0);
  auto x = RandomTensor<double>({512, 1}, rng);
  CHECK(ToVector(model.Forward(x, false)) == ToVector(x));
}

TEST_CASE("identity modulation reduces to the plain U-Net") {
  ModelConfig config = SmallConfig();
  config.transformer_layers = 2;
  AfilmNet<float> model(config, 21);
  model.ForceIdentityModulation();
  const AfilmNet<float> plain = model.WithoutAfilm();
  CHECK(CountParameters(plain) < CountParameters(model));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    auto x = RandomTensor<float>({512, 1}, rng);
    CHECK(ToVector(model.Forward(x, false)) ==
          ToVector(plain.Forward(x, false)));
  }
}

// ReLU units that are inactive for the whole patch legitimately pass no
// gradient, so the check is per tensor: a tensor with no gradient at all
// means a broken path. The attention key bias is exempt since softmax is
// invariant to the per-row shift it adds.
TEST_CASE("gradients reach every parameter tensor") {
  ModelConfig config = SmallConfig();
  config.filters_log2_offset = 3;
  config.max_filters = 32;
  config.ffn_hidden = 32;
  AfilmNet<float> model(config, 17);
  std::mt19937_64 rng(6);
  auto x = RandomTensor<float>({512, 1}, rng);
  auto target = RandomTensor<float>({512, 1}, rng);
  std::mt19937_64 dropout(1);
  const auto named = model.Parameters();
  auto params = model.ParameterTensors();
  auto grads = GradOf<float>(MseLoss(model.Forward(x, true, &dropout), target),
                             params);
  for (size_t k = 0; k < named.size(); ++k) {
    INFO(named[k].name);
    CHECK(std::all_of(grads[k].begin(), grads[k].end(),
                      [](float v) { return std::isfinite(v); }));
    if (named[k].name.find("key.bias") != std::string::npos) continue;
    CHECK(std::any_of(grads[k].begin(), grads[k].end(),
                      [](float v) { return v != 0.0f; }));
  }
}

TEST_CASE("forward passes are deterministic") {
  AfilmNet<float> a(SmallConfig(), 30);
  AfilmNet<float> b(SmallConfig(), 30);
  std::mt19937_64 rng(2);
  auto x = RandomTensor<float>({512, 1}, rng);
  std::mt19937_64 d1(77), d2(77);
  const auto ya = ToVector(a.Forward(x, true, &d1));
  CHECK(ya == ToVector(b.Forward(x, true, &d2)));
  const auto ea = ToVector(a.Forward(x, false));
  CHECK(ea == ToVector(a.Forward(x, false)));
  CHECK(ya != ea);
  CHECK_THROWS_AS(a.Forward(x, true), ParameterError);
}

}  // namespace
}  // namespace afsr
