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

#include "afsr/net/inference.h"

#include <algorithm>

namespace afsr {
namespace {

void RunWindow(const AfilmNet<float>& model, std::span<const double> signal,
               size_t start, size_t keep_from, size_t length,
               std::vector<double>& out) {
  std::vector<float> window(length, 0.0f);
  const size_t available = std::min(length, signal.size() - start);
  for (size_t i = 0; i < available; ++i) window[i] = float(signal[start + i]);
  const std::vector<float> y = model.Predict(window);
  for (size_t i = keep_from; i < available; ++i) out[start + i] = y[i];
}

}  // namespace

std::vector<double> RunPatched(const AfilmNet<float>& model,
                               std::span<const double> signal) {
  const size_t length = size_t(model.config().patch_length);
  std::vector<double> out(signal.size(), 0.0);
  if (signal.empty()) return out;
  if (signal.size() <= length) {
    RunWindow(model, signal, 0, 0, length, out);
    return out;
  }
  size_t start = 0;
  for (; start + length <= signal.size(); start += length) {
    RunWindow(model, signal, start, 0, length, out);
  }
  if (start < signal.size()) {
    const size_t tail = signal.size() - length;
    RunWindow(model, signal, tail, start - tail, length, out);
  }
  return out;
}

}  // namespace afsr
