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

#include "afsr/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "afsr/error.h"

namespace afsr {
namespace {

using internal::MakeResult;
using internal::Node;

template <typename S>
using RowMatrix =
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MatrixMap = Eigen::Map<RowMatrix<S>>;
template <typename S>
using ConstMatrixMap = Eigen::Map<const RowMatrix<S>>;
template <typename S>
using StridedConstMap =
    Eigen::Map<const RowMatrix<S>, Eigen::Unaligned, Eigen::OuterStride<>>;
template <typename S>
using RowVectorMap = Eigen::Map<Eigen::Matrix<S, 1, Eigen::Dynamic>>;
template <typename S>
using ConstRowVectorMap = Eigen::Map<const Eigen::Matrix<S, 1, Eigen::Dynamic>>;

template <typename S>
void RequireRank(const Tensor<S>& x, size_t rank, const char* op,
                 const char* name) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": " + name + " must have rank " +
                         std::to_string(rank) + ", got shape " +
                         ShapeToString(x.shape()));
  }
}

template <typename S>
void RequireSameShape(const Tensor<S>& a, const Tensor<S>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeToString(a.shape()) + " vs " +
                         ShapeToString(b.shape()));
  }
}

// Gradient buffer of input `i`, or nullptr when that input needs none.
template <typename S>
S* InputGrad(Node<S>& self, size_t i) {
  auto& in = *self.inputs[i];
  if (!in.requires_grad) return nullptr;
  return in.EnsureGrad().data();
}

}  // namespace

template <typename S>
Tensor<S> Conv1d(const Tensor<S>& input, const Tensor<S>& kernels,
                 const Tensor<S>& bias, size_t stride) {
  RequireRank(input, 2, "conv1d", "input");
  RequireRank(kernels, 3, "conv1d", "kernels");
  const size_t steps = input.dim(0);
  const size_t in_ch = input.dim(1);
  const size_t out_ch = kernels.dim(0);
  const size_t width = kernels.dim(1);
  if (kernels.dim(2) != in_ch) {
    throw DimensionError("conv1d: kernel axis 2 (input channels) is " +
                         std::to_string(kernels.dim(2)) +
                         " but input axis 1 (channels) is " +
                         std::to_string(in_ch));
  }
  if (bias.numel() != out_ch) {
    throw DimensionError("conv1d: bias axis 0 has " +
                         std::to_string(bias.numel()) +
                         " entries, kernel axis 0 (output channels) has " +
                         std::to_string(out_ch));
  }
  if (width % 2 == 0) {
    throw DimensionError("conv1d: kernel axis 1 (width) must be odd, got " +
                         std::to_string(width));
  }
  if (stride == 0) throw ParameterError("conv1d: stride must be positive");

  const size_t pad = (width - 1) / 2;
  const size_t out_steps = (steps + stride - 1) / stride;
  const size_t rows = (out_steps - 1) * stride + width;
  const size_t patch = width * in_ch;

  auto padded = std::make_shared<std::vector<S>>(rows * in_ch, S(0));
  {
    const S* x = input.data().data();
    for (size_t t = 0; t < steps && t + pad < rows; ++t) {
      std::copy_n(x + t * in_ch, in_ch, padded->data() + (t + pad) * in_ch);
    }
  }

  std::vector<S> out(out_steps * out_ch);
  {
    StridedConstMap<S> windows(padded->data(), out_steps, patch,
                               Eigen::OuterStride<>(stride * in_ch));
    ConstMatrixMap<S> w(kernels.data().data(), out_ch, patch);
    MatrixMap<S> y(out.data(), out_steps, out_ch);
    y.noalias() = windows * w.transpose();
    y.rowwise() += ConstRowVectorMap<S>(bias.data().data(), out_ch);
  }

  auto backward = [=](Node<S>& self) {
    ConstMatrixMap<S> g(self.grad.data(), out_steps, out_ch);
    StridedConstMap<S> windows(padded->data(), out_steps, patch,
                               Eigen::OuterStride<>(stride * in_ch));
    const auto& kernel_node = *self.inputs[1];
    if (S* dw = InputGrad(self, 1)) {
      MatrixMap<S>(dw, out_ch, patch).noalias() += g.transpose() * windows;
    }
    if (S* db = InputGrad(self, 2)) {
      RowVectorMap<S>(db, out_ch) += g.colwise().sum();
    }
    if (S* dx = InputGrad(self, 0)) {
      ConstMatrixMap<S> w(kernel_node.value.data(), out_ch, patch);
      RowMatrix<S> dwin = g * w;
      std::vector<S> dpad(rows * in_ch, S(0));
      for (size_t t = 0; t < out_steps; ++t) {
        S* dst = dpad.data() + t * stride * in_ch;
        const S* src = dwin.data() + t * patch;
        for (size_t j = 0; j < patch; ++j) dst[j] += src[j];
      }
      for (size_t t = 0; t < steps && t + pad < rows; ++t) {
        const S* src = dpad.data() + (t + pad) * in_ch;
        S* dst = dx + t * in_ch;
        for (size_t c = 0; c < in_ch; ++c) dst[c] += src[c];
      }
    }
  };
  return MakeResult<S>({out_steps, out_ch}, std::move(out),
                       {input, kernels, bias}, backward);
}

template <typename S>
Tensor<S> Relu(const Tensor<S>& x) {
  std::vector<S> out(x.data().begin(), x.data().end());
  for (S& v : out) v = v > S(0) ? v : S(0);
  auto backward = [](Node<S>& self) {
    if (S* dx = InputGrad(self, 0)) {
      const auto& xv = self.inputs[0]->value;
      for (size_t i = 0; i < xv.size(); ++i) {
        if (xv[i] > S(0)) dx[i] += self.grad[i];
      }
    }
  };
  return MakeResult<S>(x.shape(), std::move(out), {x}, backward);
}

template <typename S>
Tensor<S> Dropout(const Tensor<S>& x, double rate, std::mt19937_64& rng,
                  bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ParameterError("dropout rate must lie in [0, 1), got " +
                         std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const S keep_scale = S(1.0 / (1.0 - rate));
  auto mask = std::make_shared<std::vector<S>>(x.numel());
  for (S& m : *mask) {
    // 53 random bits mapped to [0, 1); independent of the standard library's
    // distribution implementations.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u >= rate ? keep_scale : S(0);
  }
  std::vector<S> out(x.numel());
  const auto xv = x.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * (*mask)[i];
  auto backward = [mask](Node<S>& self) {
    if (S* dx = InputGrad(self, 0)) {
      for (size_t i = 0; i < mask->size(); ++i) {
        dx[i] += self.grad[i] * (*mask)[i];
      }
    }
  };
  return MakeResult<S>(x.shape(), std::move(out), {x}, backward);
}

template <typename S>
Tensor<S> Add(const Tensor<S>& a, const Tensor<S>& b) {
  RequireSameShape(a, b, "add");
  std::vector<S> out(a.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  auto backward = [](Node<S>& self) {
    for (size_t k = 0; k < 2; ++k) {
      if (S* d = InputGrad(self, k)) {
        for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
      }
    }
  };
  return MakeResult<S>(a.shape(), std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> Sub(const Tensor<S>& a, const Tensor<S>& b) {
  RequireSameShape(a, b, "sub");
  std::vector<S> out(a.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  auto backward = [](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i];
    }
    if (S* d = InputGrad(self, 1)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] -= self.grad[i];
    }
  };
  return MakeResult<S>(a.shape(), std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> Mul(const Tensor<S>& a, const Tensor<S>& b) {
  RequireSameShape(a, b, "mul");
  std::vector<S> out(a.numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  auto backward = [](Node<S>& self) {
    const auto& av = self.inputs[0]->value;
    const auto& bv = self.inputs[1]->value;
    if (S* d = InputGrad(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * bv[i];
    }
    if (S* d = InputGrad(self, 1)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * av[i];
    }
  };
  return MakeResult<S>(a.shape(), std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> Scale(const Tensor<S>& x, S factor) {
  std::vector<S> out(x.data().begin(), x.data().end());
  for (S& v : out) v *= factor;
  auto backward = [factor](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) d[i] += self.grad[i] * factor;
    }
  };
  return MakeResult<S>(x.shape(), std::move(out), {x}, backward);
}

template <typename S>
Tensor<S> MatMul(const Tensor<S>& a, const Tensor<S>& b) {
  RequireRank(a, 2, "matmul", "lhs");
  RequireRank(b, 2, "matmul", "rhs");
  const size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: lhs axis 1 is " + std::to_string(k) +
                         " but rhs axis 0 is " + std::to_string(b.dim(0)));
  }
  std::vector<S> out(m * n);
  MatrixMap<S>(out.data(), m, n).noalias() =
      ConstMatrixMap<S>(a.data().data(), m, k) *
      ConstMatrixMap<S>(b.data().data(), k, n);
  auto backward = [m, k, n](Node<S>& self) {
    ConstMatrixMap<S> g(self.grad.data(), m, n);
    if (S* da = InputGrad(self, 0)) {
      MatrixMap<S>(da, m, k).noalias() +=
          g * ConstMatrixMap<S>(self.inputs[1]->value.data(), k, n).transpose();
    }
    if (S* db = InputGrad(self, 1)) {
      MatrixMap<S>(db, k, n).noalias() +=
          ConstMatrixMap<S>(self.inputs[0]->value.data(), m, k).transpose() * g;
    }
  };
  return MakeResult<S>({m, n}, std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> MatMulTransposed(const Tensor<S>& a, const Tensor<S>& b) {
  RequireRank(a, 2, "matmul_transposed", "lhs");
  RequireRank(b, 2, "matmul_transposed", "rhs");
  const size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) {
    throw DimensionError("matmul_transposed: lhs axis 1 is " +
                         std::to_string(k) + " but rhs axis 1 is " +
                         std::to_string(b.dim(1)));
  }
  std::vector<S> out(m * n);
  MatrixMap<S>(out.data(), m, n).noalias() =
      ConstMatrixMap<S>(a.data().data(), m, k) *
      ConstMatrixMap<S>(b.data().data(), n, k).transpose();
  auto backward = [m, k, n](Node<S>& self) {
    ConstMatrixMap<S> g(self.grad.data(), m, n);
    if (S* da = InputGrad(self, 0)) {
      MatrixMap<S>(da, m, k).noalias() +=
          g * ConstMatrixMap<S>(self.inputs[1]->value.data(), n, k);
    }
    if (S* db = InputGrad(self, 1)) {
      MatrixMap<S>(db, n, k).noalias() +=
          g.transpose() * ConstMatrixMap<S>(self.inputs[0]->value.data(), m, k);
    }
  };
  return MakeResult<S>({m, n}, std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> AddRowBias(const Tensor<S>& x, const Tensor<S>& bias) {
  RequireRank(x, 2, "add_row_bias", "input");
  const size_t m = x.dim(0), n = x.dim(1);
  if (bias.numel() != n) {
    throw DimensionError("add_row_bias: bias has " +
                         std::to_string(bias.numel()) +
                         " entries but input axis 1 is " + std::to_string(n));
  }
  std::vector<S> out(x.data().begin(), x.data().end());
  MatrixMap<S>(out.data(), m, n).rowwise() +=
      ConstRowVectorMap<S>(bias.data().data(), n);
  auto backward = [m, n](Node<S>& self) {
    if (S* dx = InputGrad(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) dx[i] += self.grad[i];
    }
    if (S* db = InputGrad(self, 1)) {
      RowVectorMap<S>(db, n) +=
          ConstMatrixMap<S>(self.grad.data(), m, n).colwise().sum();
    }
  };
  return MakeResult<S>({m, n}, std::move(out), {x, bias}, backward);
}

template <typename S>
Tensor<S> Linear(const Tensor<S>& x, const Tensor<S>& weight,
                 const Tensor<S>& bias) {
  return AddRowBias(MatMul(x, weight), bias);
}

template <typename S>
Tensor<S> Softmax(const Tensor<S>& x, size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeToString(x.shape()));
  }
  size_t outer = 1, inner = 1;
  for (size_t i = 0; i < axis; ++i) outer *= x.dim(i);
  for (size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
  const size_t n = x.dim(axis);

  std::vector<S> out(x.numel());
  const S* in = x.data().data();
  for (size_t o = 0; o < outer; ++o) {
    for (size_t i = 0; i < inner; ++i) {
      const size_t base = o * n * inner + i;
      S peak = -std::numeric_limits<S>::infinity();
      for (size_t j = 0; j < n; ++j) peak = std::max(peak, in[base + j * inner]);
      S total = 0;
      for (size_t j = 0; j < n; ++j) {
        const S e = std::exp(in[base + j * inner] - peak);
        out[base + j * inner] = e;
        total += e;
      }
      for (size_t j = 0; j < n; ++j) out[base + j * inner] /= total;
    }
  }
  auto backward = [outer, inner, n](Node<S>& self) {
    S* dx = InputGrad(self, 0);
    if (!dx) return;
    const auto& y = self.value;
    const auto& g = self.grad;
    for (size_t o = 0; o < outer; ++o) {
      for (size_t i = 0; i < inner; ++i) {
        const size_t base = o * n * inner + i;
        S dot = 0;
        for (size_t j = 0; j < n; ++j) {
          dot += g[base + j * inner] * y[base + j * inner];
        }
        for (size_t j = 0; j < n; ++j) {
          const size_t idx = base + j * inner;
          dx[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  };
  return MakeResult<S>(x.shape(), std::move(out), {x}, backward);
}

template <typename S>
Tensor<S> LayerNorm(const Tensor<S>& x, const Tensor<S>& gain,
                    const Tensor<S>& shift, S epsilon) {
  if (x.rank() == 0) throw DimensionError("layer_norm: input has rank 0");
  const size_t width = x.shape().back();
  if (gain.numel() != width || shift.numel() != width) {
    throw DimensionError("layer_norm: gain/shift must have " +
                         std::to_string(width) + " entries (last axis)");
  }
  const size_t rows = x.numel() / width;
  auto normalized = std::make_shared<std::vector<S>>(x.numel());
  auto inv_std = std::make_shared<std::vector<S>>(rows);
  std::vector<S> out(x.numel());
  const S* in = x.data().data();
  const S* gv = gain.data().data();
  const S* sv = shift.data().data();
  for (size_t r = 0; r < rows; ++r) {
    const S* row = in + r * width;
    S mean = 0;
    for (size_t c = 0; c < width; ++c) mean += row[c];
    mean /= S(width);
    S var = 0;
    for (size_t c = 0; c < width; ++c) var += (row[c] - mean) * (row[c] - mean);
    var /= S(width);
    const S inv = S(1) / std::sqrt(var + epsilon);
    (*inv_std)[r] = inv;
    for (size_t c = 0; c < width; ++c) {
      const S xhat = (row[c] - mean) * inv;
      (*normalized)[r * width + c] = xhat;
      out[r * width + c] = gv[c] * xhat + sv[c];
    }
  }
  auto backward = [rows, width, normalized, inv_std](Node<S>& self) {
    const auto& g = self.grad;
    const auto& gv = self.inputs[1]->value;
    const auto& xhat = *normalized;
    if (S* dgain = InputGrad(self, 1)) {
      for (size_t i = 0; i < g.size(); ++i) dgain[i % width] += g[i] * xhat[i];
    }
    if (S* dshift = InputGrad(self, 2)) {
      for (size_t i = 0; i < g.size(); ++i) dshift[i % width] += g[i];
    }
    if (S* dx = InputGrad(self, 0)) {
      std::vector<S> dxhat(width);
      for (size_t r = 0; r < rows; ++r) {
        S mean_d = 0, mean_dx = 0;
        for (size_t c = 0; c < width; ++c) {
          dxhat[c] = g[r * width + c] * gv[c];
          mean_d += dxhat[c];
          mean_dx += dxhat[c] * xhat[r * width + c];
        }
        mean_d /= S(width);
        mean_dx /= S(width);
        const S inv = (*inv_std)[r];
        for (size_t c = 0; c < width; ++c) {
          dx[r * width + c] +=
              inv * (dxhat[c] - mean_d - xhat[r * width + c] * mean_dx);
        }
      }
    }
  };
  return MakeResult<S>(x.shape(), std::move(out), {x, gain, shift}, backward);
}

template <typename S>
Tensor<S> MaxPoolBlocks(const Tensor<S>& features, size_t blocks) {
  RequireRank(features, 2, "max_pool_blocks", "features");
  const size_t steps = features.dim(0), ch = features.dim(1);
  if (blocks == 0 || steps % blocks != 0) {
    throw DimensionError("max_pool_blocks: block count " +
                         std::to_string(blocks) +
                         " does not divide axis 0 length " +
                         std::to_string(steps));
  }
  const size_t len = steps / blocks;
  auto argmax = std::make_shared<std::vector<size_t>>(blocks * ch);
  std::vector<S> out(blocks * ch);
  const S* f = features.data().data();
  for (size_t b = 0; b < blocks; ++b) {
    for (size_t c = 0; c < ch; ++c) {
      size_t best = b * len * ch + c;
      for (size_t t = 1; t < len; ++t) {
        const size_t idx = (b * len + t) * ch + c;
        if (f[idx] > f[best]) best = idx;
      }
      (*argmax)[b * ch + c] = best;
      out[b * ch + c] = f[best];
    }
  }
  auto backward = [argmax](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      for (size_t i = 0; i < argmax->size(); ++i) {
        d[(*argmax)[i]] += self.grad[i];
      }
    }
  };
  return MakeResult<S>({blocks, ch}, std::move(out), {features}, backward);
}

template <typename S>
Tensor<S> AfilmModulate(const Tensor<S>& features, const Tensor<S>& gamma,
                        const Tensor<S>& beta) {
  RequireRank(features, 2, "afilm_modulate", "features");
  RequireRank(gamma, 2, "afilm_modulate", "gamma");
  RequireSameShape(gamma, beta, "afilm_modulate");
  const size_t steps = features.dim(0), ch = features.dim(1);
  const size_t blocks = gamma.dim(0);
  if (gamma.dim(1) != ch) {
    throw DimensionError("afilm_modulate: gamma axis 1 is " +
                         std::to_string(gamma.dim(1)) +
                         " but features axis 1 is " + std::to_string(ch));
  }
  if (steps % blocks != 0) {
    throw DimensionError("afilm_modulate: block count " +
                         std::to_string(blocks) +
                         " does not divide axis 0 length " +
                         std::to_string(steps));
  }
  const size_t len = steps / blocks;
  std::vector<S> out(features.numel());
  const S* f = features.data().data();
  const S* gm = gamma.data().data();
  const S* bt = beta.data().data();
  for (size_t t = 0; t < steps; ++t) {
    const size_t b = t / len;
    for (size_t c = 0; c < ch; ++c) {
      out[t * ch + c] = gm[b * ch + c] * f[t * ch + c] + bt[b * ch + c];
    }
  }
  auto backward = [steps, ch, len](Node<S>& self) {
    const auto& g = self.grad;
    const auto& fv = self.inputs[0]->value;
    const auto& gmv = self.inputs[1]->value;
    S* df = InputGrad(self, 0);
    S* dgamma = InputGrad(self, 1);
    S* dbeta = InputGrad(self, 2);
    for (size_t t = 0; t < steps; ++t) {
      const size_t b = t / len;
      for (size_t c = 0; c < ch; ++c) {
        const size_t i = t * ch + c;
        if (df) df[i] += g[i] * gmv[b * ch + c];
        if (dgamma) dgamma[b * ch + c] += g[i] * fv[i];
        if (dbeta) dbeta[b * ch + c] += g[i];
      }
    }
  };
  return MakeResult<S>(features.shape(), std::move(out),
                       {features, gamma, beta}, backward);
}

namespace {

// index of x[t, c*factor + p] for out[t*factor + p, c]
template <typename S>
Tensor<S> Rearrange(const Tensor<S>& x, Shape out_shape,
                    std::shared_ptr<std::vector<size_t>> source) {
  std::vector<S> out(x.numel());
  const S* in = x.data().data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = in[(*source)[i]];
  auto backward = [source](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      for (size_t i = 0; i < source->size(); ++i) {
        d[(*source)[i]] += self.grad[i];
      }
    }
  };
  return MakeResult<S>(std::move(out_shape), std::move(out), {x}, backward);
}

}  // namespace

template <typename S>
Tensor<S> SubpixelShuffle(const Tensor<S>& x, size_t factor) {
  RequireRank(x, 2, "subpixel_shuffle", "input");
  const size_t steps = x.dim(0), ch = x.dim(1);
  if (factor == 0 || ch % factor != 0) {
    throw DimensionError("subpixel_shuffle: factor " + std::to_string(factor) +
                         " does not divide axis 1 (channels) " +
                         std::to_string(ch));
  }
  const size_t out_ch = ch / factor;
  auto source = std::make_shared<std::vector<size_t>>(x.numel());
  for (size_t t = 0; t < steps; ++t) {
    for (size_t p = 0; p < factor; ++p) {
      for (size_t c = 0; c < out_ch; ++c) {
        (*source)[(t * factor + p) * out_ch + c] = t * ch + c * factor + p;
      }
    }
  }
  return Rearrange(x, {steps * factor, out_ch}, std::move(source));
}

template <typename S>
Tensor<S> SubpixelUnshuffle(const Tensor<S>& x, size_t factor) {
  RequireRank(x, 2, "subpixel_unshuffle", "input");
  const size_t steps = x.dim(0), ch = x.dim(1);
  if (factor == 0 || steps % factor != 0) {
    throw DimensionError("subpixel_unshuffle: factor " +
                         std::to_string(factor) +
                         " does not divide axis 0 (time) " +
                         std::to_string(steps));
  }
  const size_t out_steps = steps / factor, out_ch = ch * factor;
  auto source = std::make_shared<std::vector<size_t>>(x.numel());
  for (size_t t = 0; t < out_steps; ++t) {
    for (size_t c = 0; c < ch; ++c) {
      for (size_t p = 0; p < factor; ++p) {
        (*source)[t * out_ch + c * factor + p] = (t * factor + p) * ch + c;
      }
    }
  }
  return Rearrange(x, {out_steps, out_ch}, std::move(source));
}

template <typename S>
Tensor<S> ConcatColumns(const Tensor<S>& a, const Tensor<S>& b) {
  RequireRank(a, 2, "concat_columns", "lhs");
  RequireRank(b, 2, "concat_columns", "rhs");
  const size_t rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  if (b.dim(0) != rows) {
    throw DimensionError("concat_columns: axis 0 mismatch " +
                         std::to_string(rows) + " vs " +
                         std::to_string(b.dim(0)));
  }
  const size_t cols = ca + cb;
  std::vector<S> out(rows * cols);
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(a.data().data() + r * ca, ca, out.data() + r * cols);
    std::copy_n(b.data().data() + r * cb, cb, out.data() + r * cols + ca);
  }
  auto backward = [rows, ca, cb, cols](Node<S>& self) {
    const S* g = self.grad.data();
    if (S* da = InputGrad(self, 0)) {
      for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < ca; ++c) da[r * ca + c] += g[r * cols + c];
      }
    }
    if (S* db = InputGrad(self, 1)) {
      for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cb; ++c) db[r * cb + c] += g[r * cols + ca + c];
      }
    }
  };
  return MakeResult<S>({rows, cols}, std::move(out), {a, b}, backward);
}

template <typename S>
Tensor<S> SliceColumns(const Tensor<S>& x, size_t begin, size_t end) {
  RequireRank(x, 2, "slice_columns", "input");
  const size_t rows = x.dim(0), cols = x.dim(1);
  if (begin >= end || end > cols) {
    throw DimensionError("slice_columns: range [" + std::to_string(begin) +
                         ", " + std::to_string(end) + ") invalid for axis 1 of " +
                         std::to_string(cols));
  }
  const size_t width = end - begin;
  std::vector<S> out(rows * width);
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(x.data().data() + r * cols + begin, width,
                out.data() + r * width);
  }
  auto backward = [rows, cols, begin, width](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < width; ++c) {
          d[r * cols + begin + c] += self.grad[r * width + c];
        }
      }
    }
  };
  return MakeResult<S>({rows, width}, std::move(out), {x}, backward);
}

template <typename S>
Tensor<S> Sum(const Tensor<S>& x) {
  S total = 0;
  for (S v : x.data()) total += v;
  auto backward = [](Node<S>& self) {
    if (S* d = InputGrad(self, 0)) {
      const size_t n = self.inputs[0]->value.size();
      for (size_t i = 0; i < n; ++i) d[i] += self.grad[0];
    }
  };
  return MakeResult<S>({1}, {total}, {x}, backward);
}

template <typename S>
Tensor<S> MseLoss(const Tensor<S>& prediction, const Tensor<S>& target) {
  RequireSameShape(prediction, target, "mse_loss");
  const size_t n = prediction.numel();
  S total = 0;
  for (size_t i = 0; i < n; ++i) {
    const S d = prediction.data()[i] - target.data()[i];
    total += d * d;
  }
  auto backward = [n](Node<S>& self) {
    const auto& p = self.inputs[0]->value;
    const auto& t = self.inputs[1]->value;
    const S scale = S(2) * self.grad[0] / S(n);
    S* dp = InputGrad(self, 0);
    S* dt = InputGrad(self, 1);
    for (size_t i = 0; i < n; ++i) {
      const S d = scale * (p[i] - t[i]);
      if (dp) dp[i] += d;
      if (dt) dt[i] -= d;
    }
  };
  return MakeResult<S>({1}, {total / S(n)}, {prediction, target}, backward);
}

#define AFSR_INSTANTIATE_OPS(S)                                              \
  template Tensor<S> Conv1d(const Tensor<S>&, const Tensor<S>&,              \
                            const Tensor<S>&, size_t);                       \
  template Tensor<S> Relu(const Tensor<S>&);                                 \
  template Tensor<S> Dropout(const Tensor<S>&, double, std::mt19937_64&,     \
                             bool);                                          \
  template Tensor<S> Add(const Tensor<S>&, const Tensor<S>&);                \
  template Tensor<S> Sub(const Tensor<S>&, const Tensor<S>&);                \
  template Tensor<S> Mul(const Tensor<S>&, const Tensor<S>&);                \
  template Tensor<S> Scale(const Tensor<S>&, S);                             \
  template Tensor<S> MatMul(const Tensor<S>&, const Tensor<S>&);             \
  template Tensor<S> MatMulTransposed(const Tensor<S>&, const Tensor<S>&);   \
  template Tensor<S> AddRowBias(const Tensor<S>&, const Tensor<S>&);         \
  template Tensor<S> Linear(const Tensor<S>&, const Tensor<S>&,              \
                            const Tensor<S>&);                               \
  template Tensor<S> Softmax(const Tensor<S>&, size_t);                      \
  template Tensor<S> LayerNorm(const Tensor<S>&, const Tensor<S>&,           \
                               const Tensor<S>&, S);                         \
  template Tensor<S> MaxPoolBlocks(const Tensor<S>&, size_t);                \
  template Tensor<S> AfilmModulate(const Tensor<S>&, const Tensor<S>&,       \
                                   const Tensor<S>&);                        \
  template Tensor<S> SubpixelShuffle(const Tensor<S>&, size_t);              \
  template Tensor<S> SubpixelUnshuffle(const Tensor<S>&, size_t);            \
  template Tensor<S> ConcatColumns(const Tensor<S>&, const Tensor<S>&);      \
  template Tensor<S> SliceColumns(const Tensor<S>&, size_t, size_t);         \
  template Tensor<S> Sum(const Tensor<S>&);                                  \
  template Tensor<S> MseLoss(const Tensor<S>&, const Tensor<S>&);

AFSR_INSTANTIATE_OPS(float)
AFSR_INSTANTIATE_OPS(double)

#undef AFSR_INSTANTIATE_OPS

}  // namespace afsr
