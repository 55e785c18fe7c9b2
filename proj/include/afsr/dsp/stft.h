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

#ifndef AFSR_DSP_STFT_H_
#define AFSR_DSP_STFT_H_

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace afsr {

inline constexpr size_t kLsdFrameLength = 2048;
inline constexpr size_t kLsdHopLength = 512;
inline constexpr double kLogPowerFloor = 1e-10;

// In-place discrete Fourier transform. Radix-2 for power-of-two sizes,
// direct O(n^2) summation otherwise.
void Fft(std::vector<std::complex<double>>& data);

// Periodic Hann window: 0.5 - 0.5 cos(2 pi n / length).
std::vector<double> HannWindow(size_t length);

// Row-major [frames x bins] matrix, bins = frame_length / 2 + 1.
struct Spectrogram {
  size_t frames = 0;
  size_t bins = 0;
  std::vector<double> values;

  double at(size_t t, size_t k) const { return values[t * bins + k]; }
};

// One-sided |STFT|^2 of Hann-windowed full frames (no padding); frame t
// starts at sample t * hop.
Spectrogram StftPower(std::span<const double> signal, size_t frame_length,
                      size_t hop);

// X(t, k) = log(|S(t, k)|^2 + kLogPowerFloor).
Spectrogram StftLogPower(std::span<const double> signal,
                         size_t frame_length = kLsdFrameLength,
                         size_t hop = kLsdHopLength);

// Plain-text export: one line per frame, comma-separated values.
void WriteSpectrogramCsv(const std::filesystem::path& path,
                         const Spectrogram& spec);
// 8-bit binary PGM: width = frames, height = bins, highest frequency on the
// top row. Values are mapped linearly from [max - dynamic_range, max] to
// [0, 255].
void WriteSpectrogramPgm(const std::filesystem::path& path,
                         const Spectrogram& spec, double dynamic_range = 18.42);

}  // namespace afsr

#endif  // AFSR_DSP_STFT_H_
