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

#ifndef AFSR_DSP_PATCHES_H_
#define AFSR_DSP_PATCHES_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "afsr/dsp/audio.h"

namespace afsr {

inline constexpr size_t kDefaultPatchLength = 8192;
inline constexpr size_t kTrainPatchStride = 4096;
inline constexpr size_t kEvalPatchStride = 8192;

// One aligned training window: the cubic-upsampled low-resolution input and
// the original high-resolution target.
struct Patch {
  uint32_t file_index = 0;
  uint32_t offset = 0;
  std::vector<float> lowres;
  std::vector<float> highres;
};

struct PatchSet {
  uint32_t patch_length = kDefaultPatchLength;
  uint32_t scale = 2;
  uint32_t sample_rate_hz = 16000;
  std::vector<Patch> patches;
};

// Cuts windows of `length` samples at offsets 0, stride, 2*stride, ... and
// drops the trailing remainder. Both signals must share length and rate.
PatchSet ExtractPatches(const AudioSignal& lowres_upsampled,
                        const AudioSignal& highres, size_t length,
                        size_t stride, uint32_t file_index = 0);

// Whole-file pipeline: downsample by r, cubic-upsample back, crop the
// reference to the same length and extract patches.
PatchSet MakeTrainingPairs(const AudioSignal& highres, int r, size_t length,
                           size_t stride, uint32_t file_index = 0);

// Binary patch archive:
//   "AFSP", u32 version, u32 patch_length, u32 scale, u32 sample_rate,
//   u32 count, then per patch u32 file_index, u32 offset,
//   f32[patch_length] lowres, f32[patch_length] highres (little endian).
void SavePatchArchive(const std::filesystem::path& path, const PatchSet& set);
PatchSet LoadPatchArchive(const std::filesystem::path& path);

}  // namespace afsr

#endif  // AFSR_DSP_PATCHES_H_
