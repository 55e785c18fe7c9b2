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

#ifndef AFSR_IO_BINARY_H_
#define AFSR_IO_BINARY_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afsr/error.h"

// Little-endian framing helpers shared by the archive and checkpoint
// formats.
namespace afsr::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class Writer {
 public:
  void Bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    buffer_.insert(buffer_.end(), p, p + n);
  }
  void U8(uint8_t v) { Bytes(&v, 1); }
  void U16(uint16_t v) { Bytes(&v, 2); }
  void U32(uint32_t v) { Bytes(&v, 4); }
  void Floats(std::span<const float> v) { Bytes(v.data(), v.size() * 4); }
  void Tag(std::string_view tag) { Bytes(tag.data(), tag.size()); }

  const std::vector<unsigned char>& buffer() const { return buffer_; }
  void WriteTo(const std::filesystem::path& path) const;

 private:
  std::vector<unsigned char> buffer_;
};

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}
  static Reader FromFile(const std::filesystem::path& path);

  void Bytes(void* out, size_t n) {
    if (remaining() < n) {
      throw TruncatedFileError("truncated file: needed " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) + ", " +
                        std::to_string(remaining()) + " left");
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  uint8_t U8() { uint8_t v; Bytes(&v, 1); return v; }
  uint16_t U16() { uint16_t v; Bytes(&v, 2); return v; }
  uint32_t U32() { uint32_t v; Bytes(&v, 4); return v; }
  std::string String(size_t n) {
    std::string s(n, '\0');
    Bytes(s.data(), n);
    return s;
  }
  void Floats(std::span<float> out) { Bytes(out.data(), out.size() * 4); }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<unsigned char> bytes_;
  size_t pos_ = 0;
};

}  // namespace afsr::io

#endif  // AFSR_IO_BINARY_H_
