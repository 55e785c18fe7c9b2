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

#include "afsr/dsp/patches.h"

#include <string>

#include "afsr/dsp/resample.h"
#include "afsr/error.h"
#include "afsr/io/binary.h"

namespace afsr {
namespace {
constexpr uint32_t kArchiveVersion = 1;
}  // namespace

PatchSet ExtractPatches(const AudioSignal& lowres_upsampled,
                        const AudioSignal& highres, size_t length,
                        size_t stride, uint32_t file_index) {
  if (lowres_upsampled.size() != highres.size()) {
    throw AlignmentError("patch extraction: upsampled input has " +
                         std::to_string(lowres_upsampled.size()) +
                         " samples, reference has " +
                         std::to_string(highres.size()));
  }
  if (lowres_upsampled.sample_rate_hz != highres.sample_rate_hz) {
    throw AlignmentError("patch extraction: sample rates differ (" +
                         std::to_string(lowres_upsampled.sample_rate_hz) +
                         " vs " + std::to_string(highres.sample_rate_hz) + ")");
  }
  if (length == 0 || stride == 0) {
    throw ParameterError("patch length and stride must be positive");
  }
  PatchSet set;
  set.patch_length = static_cast<uint32_t>(length);
  set.sample_rate_hz = static_cast<uint32_t>(highres.sample_rate_hz);
  for (size_t offset = 0; offset + length <= highres.size(); offset += stride) {
    Patch p;
    p.file_index = file_index;
    p.offset = static_cast<uint32_t>(offset);
    p.lowres.assign(lowres_upsampled.samples.begin() + offset,
                    lowres_upsampled.samples.begin() + offset + length);
    p.highres.assign(highres.samples.begin() + offset,
                     highres.samples.begin() + offset + length);
    set.patches.push_back(std::move(p));
  }
  return set;
}

PatchSet MakeTrainingPairs(const AudioSignal& highres, int r, size_t length,
                           size_t stride, uint32_t file_index) {
  const ResolutionPair pair = SimulateLowResolution(highres, r);
  PatchSet set =
      ExtractPatches(pair.upsampled, pair.reference, length, stride, file_index);
  set.scale = static_cast<uint32_t>(r);
  return set;
}

void SavePatchArchive(const std::filesystem::path& path, const PatchSet& set) {
  io::Writer w;
  w.Tag("AFSP");
  w.U32(kArchiveVersion);
  w.U32(set.patch_length);
  w.U32(set.scale);
  w.U32(set.sample_rate_hz);
  w.U32(static_cast<uint32_t>(set.patches.size()));
  for (const Patch& p : set.patches) {
    if (p.lowres.size() != set.patch_length || p.highres.size() != set.patch_length) {
      throw AlignmentError("patch at offset " + std::to_string(p.offset) +
                           " does not have the archive patch length");
    }
    w.U32(p.file_index);
    w.U32(p.offset);
    w.Floats(p.lowres);
    w.Floats(p.highres);
  }
  w.WriteTo(path);
}

PatchSet LoadPatchArchive(const std::filesystem::path& path) {
  io::Reader r = io::Reader::FromFile(path);
  if (r.String(4) != "AFSP") {
    throw FormatError(path.string() + ": not a patch archive (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kArchiveVersion) {
    throw VersionError(path.string() + ": unsupported archive version " +
                       std::to_string(version));
  }
  PatchSet set;
  set.patch_length = r.U32();
  set.scale = r.U32();
  set.sample_rate_hz = r.U32();
  const uint32_t count = r.U32();
  if (set.patch_length == 0) throw FormatError(path.string() + ": zero patch length");
  set.patches.resize(count);
  for (Patch& p : set.patches) {
    p.file_index = r.U32();
    p.offset = r.U32();
    p.lowres.resize(set.patch_length);
    p.highres.resize(set.patch_length);
    r.Floats(p.lowres);
    r.Floats(p.highres);
  }
  if (r.remaining() != 0) {
    throw FormatError(path.string() + ": trailing bytes after last patch");
  }
  return set;
}

}  // namespace afsr
