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

#ifndef AFSR_DSP_AUDIO_H_
#define AFSR_DSP_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace afsr {

// Mono waveform. Samples are nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  size_t size() const { return samples.size(); }
};

// Throws ParameterError on a non-positive rate or non-finite samples.
void ValidateSignal(const AudioSignal& signal);

// Decodes a RIFF WAV file holding 16-bit PCM. Multi-channel input is
// averaged to mono; samples are scaled by 1/32768.
AudioSignal ReadWav(const std::filesystem::path& path);
AudioSignal DecodeWav(std::span<const unsigned char> bytes);

// Encodes mono 16-bit PCM. Samples are hard-limited to [-1, 1); the number of
// samples that had to be limited is returned.
size_t WriteWav(const std::filesystem::path& path, const AudioSignal& signal);
std::vector<unsigned char> EncodeWav(const AudioSignal& signal,
                                     size_t* clipped = nullptr);

}  // namespace afsr

#endif  // AFSR_DSP_AUDIO_H_
