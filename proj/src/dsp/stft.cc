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

#include "afsr/dsp/stft.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "afsr/error.h"

namespace afsr {

void Fft(std::vector<std::complex<double>>& data) {
  const size_t n = data.size();
  if (n <= 1) return;
  const double pi = std::numbers::pi;
  if ((n & (n - 1)) != 0) {
    std::vector<std::complex<double>> out(n);
    for (size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (size_t t = 0; t < n; ++t) {
        acc += data[t] * std::polar(1.0, -2.0 * pi * double((k * t) % n) / double(n));
      }
      out[k] = acc;
    }
    data = std::move(out);
    return;
  }
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < half; ++k) {
        // Twiddles are evaluated directly rather than by recurrence to keep
        // rounding error flat across k.
        const std::complex<double> w = std::polar(1.0, -2.0 * pi * double(k) / double(len));
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

std::vector<double> HannWindow(size_t length) {
  std::vector<double> w(length);
  for (size_t i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(length));
  }
  return w;
}

Spectrogram StftPower(std::span<const double> signal, size_t frame_length,
                      size_t hop) {
  if (frame_length == 0 || hop == 0) {
    throw ParameterError("STFT frame length and hop must be positive");
  }
  if (signal.size() < frame_length) {
    throw ParameterError("signal of " + std::to_string(signal.size()) +
                         " samples is shorter than one STFT frame (" +
                         std::to_string(frame_length) + ")");
  }
  const std::vector<double> window = HannWindow(frame_length);
  Spectrogram spec;
  spec.frames = 1 + (signal.size() - frame_length) / hop;
  spec.bins = frame_length / 2 + 1;
  spec.values.resize(spec.frames * spec.bins);
  std::vector<std::complex<double>> buffer(frame_length);
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t i = 0; i < frame_length; ++i) {
      buffer[i] = signal[t * hop + i] * window[i];
    }
    Fft(buffer);
    for (size_t k = 0; k < spec.bins; ++k) {
      spec.values[t * spec.bins + k] = std::norm(buffer[k]);
    }
  }
  return spec;
}

Spectrogram StftLogPower(std::span<const double> signal, size_t frame_length,
                         size_t hop) {
  Spectrogram spec = StftPower(signal, frame_length, hop);
  for (double& v : spec.values) v = std::log(v + kLogPowerFloor);
  return spec;
}

void WriteSpectrogramCsv(const std::filesystem::path& path,
                         const Spectrogram& spec) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[64];
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t k = 0; k < spec.bins; ++k) {
      if (k) out << ',';
      auto res = std::to_chars(buf, buf + sizeof(buf), spec.at(t, k));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

void WriteSpectrogramPgm(const std::filesystem::path& path,
                         const Spectrogram& spec, double dynamic_range) {
  if (!(dynamic_range > 0.0)) throw ParameterError("dynamic range must be positive");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << spec.frames << ' ' << spec.bins << "\n255\n";
  const double top = spec.values.empty()
                         ? 0.0
                         : *std::max_element(spec.values.begin(), spec.values.end());
  const double bottom = top - dynamic_range;
  std::vector<unsigned char> row(spec.frames);
  for (size_t k = spec.bins; k-- > 0;) {
    for (size_t t = 0; t < spec.frames; ++t) {
      const double level = (spec.at(t, k) - bottom) / dynamic_range;
      row[t] = static_cast<unsigned char>(
          std::lround(255.0 * std::clamp(level, 0.0, 1.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace afsr
