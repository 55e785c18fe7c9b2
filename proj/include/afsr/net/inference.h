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

#ifndef AFSR_NET_INFERENCE_H_
#define AFSR_NET_INFERENCE_H_

#include <span>
#include <vector>

#include "afsr/net/model.h"

namespace afsr {

// Runs the model over a whole cubic-upsampled signal in evaluation mode.
// The signal is cut into consecutive non-overlapping windows of the model's
// patch length. When a remainder is left, one more window is aligned to the
// end of the signal and only its new samples are kept (overlap-discard).
// Signals shorter than one window are zero-padded.
std::vector<double> RunPatched(const AfilmNet<float>& model,
                               std::span<const double> signal);

}  // namespace afsr

#endif  // AFSR_NET_INFERENCE_H_
