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

#ifndef AFSR_DSP_RESAMPLE_H_
#define AFSR_DSP_RESAMPLE_H_

#include <span>
#include <vector>

#include "afsr/dsp/audio.h"

namespace afsr {

// Decimation defaults: order-8 Chebyshev type-I with 0.05 dB ripple and a
// passband edge at 0.8 / r of Nyquist.
inline constexpr int kDecimationOrder = 8;
inline constexpr double kDecimationRippleDb = 0.05;
inline constexpr double kDecimationCutoffScale = 0.8;

// Anti-alias lowpass (zero-phase) then keep every r-th sample. The output
// holds floor(N / r) samples at rate / r.
AudioSignal Downsample(const AudioSignal& signal, int r);

// Natural cubic spline through the knots (i*r, x[i]), evaluated on the
// integer grid 0 .. N*r - 1. Positions past the last knot follow the final
// spline piece.
std::vector<double> CubicUpsample(std::span<const double> samples, int r);
AudioSignal CubicUpsample(const AudioSignal& signal, int r);

// The model's view of a high-resolution signal: downsample by r, cubic
// upsample back, and the reference cropped to the same length.
struct ResolutionPair {
  AudioSignal upsampled;
  AudioSignal reference;
};
ResolutionPair SimulateLowResolution(const AudioSignal& highres, int r);

}  // namespace afsr

#endif  // AFSR_DSP_RESAMPLE_H_
