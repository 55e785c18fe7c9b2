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

#include "afsr/dsp/iir.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "afsr/error.h"

namespace afsr {

IirFilter::IirFilter(std::vector<double> numerator,
                     std::vector<double> denominator)
    : b_(std::move(numerator)), a_(std::move(denominator)) {
  if (b_.empty() || a_.empty()) {
    throw ParameterError("IIR filter needs non-empty coefficient vectors");
  }
  if (a_[0] == 0.0) throw ParameterError("IIR filter needs a[0] != 0");
  const double a0 = a_[0];
  for (double& v : b_) v /= a0;
  for (double& v : a_) v /= a0;
  for (const auto& p : Poles()) {
    if (!(std::abs(p) < 1.0)) {
      throw ParameterError("unstable IIR filter: pole with magnitude " +
                           std::to_string(std::abs(p)));
    }
  }
}

std::vector<std::complex<double>> IirFilter::Poles() const {
  // Trailing zero coefficients only add poles at the origin.
  size_t n = a_.size() - 1;
  while (n > 0 && a_[n] == 0.0) --n;
  std::vector<std::complex<double>> poles(a_.size() - 1 - n, 0.0);
  if (n == 0) return poles;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (size_t j = 0; j < n; ++j) companion(0, j) = -a_[j + 1];
  for (size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    poles.push_back(solver.eigenvalues()[i]);
  }
  return poles;
}

std::complex<double> IirFilter::Response(double normalized_frequency) const {
  const std::complex<double> zinv =
      std::polar(1.0, -std::numbers::pi * normalized_frequency);
  auto horner = [&](const std::vector<double>& c) {
    std::complex<double> acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * zinv + *it;
    return acc;
  };
  return horner(b_) / horner(a_);
}

std::vector<double> IirFilter::SteadyStateInitial() const {
  const size_t n = std::max(a_.size(), b_.size());
  if (n < 2) return {};
  std::vector<double> a(a_), b(b_);
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  const size_t m = n - 1;
  // (I - companion(a)^T) zi = b[1:] - a[1:] * b[0]
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
  for (size_t j = 0; j < m; ++j) system(j, 0) += a[j + 1];
  for (size_t i = 1; i < m; ++i) system(i - 1, i) -= 1.0;
  Eigen::VectorXd rhs(m);
  for (size_t i = 0; i < m; ++i) rhs(i) = b[i + 1] - a[i + 1] * b[0];
  Eigen::VectorXd zi = system.partialPivLu().solve(rhs);
  return std::vector<double>(zi.data(), zi.data() + m);
}

namespace {

double RippleEpsilon(double ripple_db) {
  return std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
}

void CheckDesignArguments(int order, double ripple_db, double cutoff) {
  if (order < 1) {
    throw ParameterError("filter order must be >= 1, got " +
                         std::to_string(order));
  }
  if (!(ripple_db > 0.0)) {
    throw ParameterError("passband ripple must be positive, got " +
                         std::to_string(ripple_db));
  }
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw ParameterError("cutoff must lie in (0, 1) of Nyquist, got " +
                         std::to_string(cutoff));
  }
}

}  // namespace

IirFilter DesignCheby1Lowpass(int order, double ripple_db, double cutoff) {
  using Complex = std::complex<double>;
  CheckDesignArguments(order, ripple_db, cutoff);
  const double pi = std::numbers::pi;
  const double eps = RippleEpsilon(ripple_db);
  const double mu = std::asinh(1.0 / eps) / order;

  // Analog prototype with unit passband edge.
  std::vector<Complex> poles;
  Complex gain = 1.0;
  for (int m = -order + 1; m < order; m += 2) {
    const double theta = pi * m / (2.0 * order);
    const Complex p = -std::sinh(Complex(mu, theta));
    poles.push_back(p);
    gain *= -p;
  }
  if (order % 2 == 0) gain /= std::sqrt(1.0 + eps * eps);

  // Prewarp, scale, and map s -> (1 - z^-1) / (1 + z^-1).
  const double warped = std::tan(pi * cutoff / 2.0);
  Complex denominator_gain = 1.0;
  std::vector<Complex> zpoles;
  for (const Complex& p : poles) {
    const Complex scaled = p * warped;
    zpoles.push_back((1.0 + scaled) / (1.0 - scaled));
    denominator_gain *= (1.0 - scaled);
    gain *= warped;
  }
  const double k = (gain / denominator_gain).real();

  // b = k * (1 + z^-1)^order, a = prod (1 - p z^-1).
  std::vector<double> b(order + 1, 0.0);
  b[0] = 1.0;
  for (int i = 0; i < order; ++i) {
    for (int j = i + 1; j > 0; --j) b[j] += b[j - 1];
  }
  for (double& v : b) v *= k;
  std::vector<Complex> a(order + 1, 0.0);
  a[0] = 1.0;
  for (int i = 0; i < order; ++i) {
    for (int j = i + 1; j > 0; --j) a[j] -= zpoles[i] * a[j - 1];
  }
  std::vector<double> a_real(order + 1);
  for (int i = 0; i <= order; ++i) a_real[i] = a[i].real();
  return IirFilter(std::move(b), std::move(a_real));
}

std::vector<double> ApplyIir(const IirFilter& filter,
                             std::span<const double> input,
                             std::span<const double> initial_state) {
  const size_t n = std::max(filter.numerator().size(),
                            filter.denominator().size());
  std::vector<double> b(filter.numerator()), a(filter.denominator());
  b.resize(n, 0.0);
  a.resize(n, 0.0);
  std::vector<double> state(n - 1, 0.0);
  if (!initial_state.empty()) {
    if (initial_state.size() != state.size()) {
      throw DimensionError("IIR initial state needs " +
                           std::to_string(state.size()) + " entries, got " +
                           std::to_string(initial_state.size()));
    }
    std::copy(initial_state.begin(), initial_state.end(), state.begin());
  }
  std::vector<double> out(input.size());
  for (size_t i = 0; i < input.size(); ++i) {
    const double x = input[i];
    const double y = b[0] * x + (state.empty() ? 0.0 : state[0]);
    for (size_t k = 0; k + 1 < state.size(); ++k) {
      state[k] = b[k + 1] * x - a[k + 1] * y + state[k + 1];
    }
    if (!state.empty()) state.back() = b[n - 1] * x - a[n - 1] * y;
    out[i] = y;
  }
  return out;
}

AudioSignal ApplyIir(const IirFilter& filter, const AudioSignal& signal) {
  if (signal.samples.empty()) throw ParameterError("cannot filter an empty signal");
  return {ApplyIir(filter, signal.samples), signal.sample_rate_hz};
}

std::vector<double> FiltFilt(const IirFilter& filter,
                             std::span<const double> input) {
  if (input.empty()) throw ParameterError("cannot filter an empty signal");
  const size_t taps = std::max(filter.numerator().size(),
                               filter.denominator().size());
  const size_t pad = std::min(3 * taps, input.size() - 1);
  const size_t len = input.size();

  std::vector<double> ext;
  ext.reserve(len + 2 * pad);
  for (size_t i = pad; i >= 1; --i) ext.push_back(2.0 * input[0] - input[i]);
  ext.insert(ext.end(), input.begin(), input.end());
  for (size_t i = 1; i <= pad; ++i) {
    ext.push_back(2.0 * input[len - 1] - input[len - 1 - i]);
  }

  const std::vector<double> zi = filter.SteadyStateInitial();
  auto scaled = [&](double x0) {
    std::vector<double> s(zi);
    for (double& v : s) v *= x0;
    return s;
  };
  std::vector<double> forward = ApplyIir(filter, ext, scaled(ext.front()));
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward = ApplyIir(filter, forward, scaled(forward.front()));
  std::reverse(backward.begin(), backward.end());
  return std::vector<double>(backward.begin() + pad,
                             backward.begin() + pad + len);
}

}  // namespace afsr
