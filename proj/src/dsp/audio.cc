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

#include "afsr/dsp/audio.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "afsr/error.h"

namespace afsr {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void PutU32(std::vector<unsigned char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void PutTag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

void ValidateSignal(const AudioSignal& signal) {
  if (signal.sample_rate_hz <= 0) {
    throw ParameterError("sample rate must be positive, got " +
                         std::to_string(signal.sample_rate_hz));
  }
  for (double v : signal.samples) {
    if (!std::isfinite(v)) throw ParameterError("signal has non-finite samples");
  }
}

AudioSignal DecodeWav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }
  bool have_format = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (body + size > bytes.size() && std::memcmp(chunk, "data", 4) != 0) {
      throw FormatError("truncated WAV chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("WAV fmt chunk too short");
      uint16_t tag = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (tag == kFormatExtensible && size >= 26) {
        tag = ReadU16(bytes.data() + body + 24);
      }
      if (tag != kFormatPcm) {
        throw FormatError("unsupported WAV encoding (format tag " +
                          std::to_string(tag) + "); expected PCM");
      }
      if (bits != 16) {
        throw FormatError("unsupported WAV sample width " +
                          std::to_string(bits) + " bits; expected 16");
      }
      if (channels == 0 || rate == 0) throw FormatError("WAV fmt chunk is empty");
      have_format = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_format) throw FormatError("WAV data chunk precedes fmt chunk");
      // Tolerate writers that leave a placeholder size in the header.
      const size_t available = std::min<size_t>(size, bytes.size() - body);
      const size_t frame_bytes = 2u * channels;
      const size_t frames = available / frame_bytes;
      AudioSignal signal;
      signal.sample_rate_hz = static_cast<int>(rate);
      signal.samples.resize(frames);
      for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (size_t c = 0; c < channels; ++c) {
          const auto raw = static_cast<int16_t>(
              ReadU16(bytes.data() + body + i * frame_bytes + 2 * c));
          acc += raw / 32768.0;
        }
        signal.samples[i] = acc / channels;
      }
      return signal;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError("WAV file has no data chunk");
}

AudioSignal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return DecodeWav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<unsigned char> EncodeWav(const AudioSignal& signal,
                                     size_t* clipped) {
  if (signal.sample_rate_hz <= 0) {
    throw ParameterError("sample rate must be positive");
  }
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(signal.sample_rate_hz));
  PutU32(out, static_cast<uint32_t>(signal.sample_rate_hz) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  size_t limited = 0;
  for (double v : signal.samples) {
    long q = 0;
    if (!std::isfinite(v)) {
      ++limited;
    } else {
      q = std::lround(v * 32768.0);
      if (q > 32767 || q < -32768) {
        ++limited;
        q = q > 0 ? 32767 : -32768;
      }
    }
    PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  if (clipped) *clipped = limited;
  return out;
}

size_t WriteWav(const std::filesystem::path& path, const AudioSignal& signal) {
  size_t clipped = 0;
  const auto bytes = EncodeWav(signal, &clipped);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
  return clipped;
}

}  // namespace afsr
