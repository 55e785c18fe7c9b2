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

#include "afsr/dsp/resample.h"

#include <string>

#include "afsr/dsp/iir.h"
#include "afsr/error.h"

namespace afsr {

AudioSignal Downsample(const AudioSignal& signal, int r) {
  if (r < 2) {
    throw ParameterError("downsampling factor must be >= 2, got " +
                         std::to_string(r));
  }
  if (signal.samples.empty()) throw ParameterError("cannot downsample an empty signal");
  if (signal.sample_rate_hz % r != 0) {
    throw ParameterError("sample rate " + std::to_string(signal.sample_rate_hz) +
                         " is not divisible by " + std::to_string(r));
  }
  const IirFilter lowpass = DesignCheby1Lowpass(
      kDecimationOrder, kDecimationRippleDb, kDecimationCutoffScale / r);
  const std::vector<double> filtered = FiltFilt(lowpass, signal.samples);
  AudioSignal out;
  out.sample_rate_hz = signal.sample_rate_hz / r;
  out.samples.resize(signal.samples.size() / r);
  for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = filtered[i * r];
  return out;
}

std::vector<double> CubicUpsample(std::span<const double> y, int r) {
  if (r < 1) throw ParameterError("upsampling factor must be >= 1");
  const size_t n = y.size();
  if (n < 4) {
    throw ParameterError("cubic upsampling needs at least 4 samples, got " +
                         std::to_string(n));
  }
  const double h = r;
  // Second derivatives M at the knots; M[0] = M[n-1] = 0. Interior rows:
  // M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2.
  std::vector<double> m(n, 0.0);
  const size_t inner = n - 2;
  std::vector<double> diag(inner, 4.0), rhs(inner);
  for (size_t i = 0; i < inner; ++i) {
    rhs[i] = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
  }
  for (size_t i = 1; i < inner; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w;
    rhs[i] -= w * rhs[i - 1];
  }
  m[inner] = rhs[inner - 1] / diag[inner - 1];
  for (size_t i = inner - 1; i >= 1; --i) m[i] = (rhs[i - 1] - m[i + 1]) / diag[i - 1];

  std::vector<double> out(n * static_cast<size_t>(r));
  for (size_t k = 0; k < out.size(); ++k) {
    const size_t seg = std::min(k / static_cast<size_t>(r), n - 2);
    const double left = static_cast<double>(k) - static_cast<double>(seg) * h;
    const double right = h - left;
    out[k] = m[seg] * right * right * right / (6.0 * h) +
             m[seg + 1] * left * left * left / (6.0 * h) +
             (y[seg] / h - m[seg] * h / 6.0) * right +
             (y[seg + 1] / h - m[seg + 1] * h / 6.0) * left;
  }
  return out;
}

AudioSignal CubicUpsample(const AudioSignal& signal, int r) {
  return {CubicUpsample(std::span<const double>(signal.samples), r),
          signal.sample_rate_hz * r};
}

ResolutionPair SimulateLowResolution(const AudioSignal& highres, int r) {
  ResolutionPair pair;
  pair.upsampled = CubicUpsample(Downsample(highres, r), r);
  pair.reference.sample_rate_hz = highres.sample_rate_hz;
  pair.reference.samples.assign(
      highres.samples.begin(),
      highres.samples.begin() + std::ptrdiff_t(pair.upsampled.size()));
  return pair;
}

}  // namespace afsr
