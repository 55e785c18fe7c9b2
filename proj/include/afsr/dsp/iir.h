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

#ifndef AFSR_DSP_IIR_H_
#define AFSR_DSP_IIR_H_

#include <complex>
#include <vector>

#include "afsr/dsp/audio.h"

namespace afsr {

// Rational transfer function
//   H(z) = (b[0] + b[1] z^-1 + ...) / (1 + a[1] z^-1 + ...).
// Construction normalizes a[0] to 1 and rejects filters with a pole on or
// outside the unit circle.
class IirFilter {
 public:
  IirFilter(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const { return b_; }
  const std::vector<double>& denominator() const { return a_; }
  // Roots of the denominator polynomial in z.
  std::vector<std::complex<double>> Poles() const;
  // H(e^{j*pi*f}) for f in [0, 1] (1 = Nyquist).
  std::complex<double> Response(double normalized_frequency) const;
  // Initial state for which a constant unit input gives a constant output
  // from the first sample on.
  std::vector<double> SteadyStateInitial() const;

 private:
  std::vector<double> b_;
  std::vector<double> a_;
};

// Chebyshev type-I lowpass: analog prototype with `ripple_db` passband
// ripple, prewarped and mapped through the bilinear transform. `cutoff` is
// the passband edge as a fraction of Nyquist, in (0, 1).
IirFilter DesignCheby1Lowpass(int order, double ripple_db, double cutoff);

// Causal filtering in transposed direct form II. `initial_state`, when given,
// has max(len(a), len(b)) - 1 entries.
std::vector<double> ApplyIir(const IirFilter& filter,
                             std::span<const double> input,
                             std::span<const double> initial_state = {});
AudioSignal ApplyIir(const IirFilter& filter, const AudioSignal& signal);

// Zero-phase forward-backward filtering with odd-extension padding of
// 3 * max(len(a), len(b)) samples and steady-state initial conditions.
std::vector<double> FiltFilt(const IirFilter& filter,
                             std::span<const double> input);

}  // namespace afsr

#endif  // AFSR_DSP_IIR_H_
