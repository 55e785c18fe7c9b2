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

#ifndef AFSR_ERROR_H_
#define AFSR_ERROR_H_

#include <stdexcept>
#include <string>

namespace afsr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not line up. The message names the offending axis.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A configuration or argument value outside its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Paired signals whose lengths or rates do not line up.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported file contents (WAV, checkpoint, archive).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A file that ends before its declared contents.
class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A well-formed file written by an unsupported format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Stored tensors that do not fit the model being loaded. The message names
// the tensor.
class ShapeMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

// I/O failures: missing files, unreadable directories, short writes.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace afsr

#endif  // AFSR_ERROR_H_
