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

#ifndef AFSR_TRAINER_H_
#define AFSR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <vector>

#include "afsr/adam.h"
#include "afsr/dsp/patches.h"
#include "afsr/error.h"
#include "afsr/net/model.h"
#include "afsr/ops.h"
#include "afsr/tensor.h"

namespace afsr {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 16;
  AdamOptions adam;
  uint64_t seed = 0;
  // Save a checkpoint to `checkpoint_path` after every N-th epoch; 0 saves
  // nothing during training.
  int checkpoint_every = 0;
  std::filesystem::path checkpoint_path;
};

void ValidateTrainConfig(const TrainConfig& config);

// Everything needed to continue a run bit-exactly.
struct TrainingState {
  AfilmNet<float> model;
  AdamState<float> adam;
  uint64_t seed = 0;
  uint64_t epoch = 0;  // completed epochs
  uint64_t step = 0;   // completed optimizer steps
  std::vector<double> loss_curve;  // mean training loss of each epoch

  // Model initialized from `seed`, zero Adam moments.
  static TrainingState Fresh(const ModelConfig& model_config,
                             const AdamOptions& adam, uint64_t seed);
};

// A non-finite batch loss. Nothing from the offending batch is applied.
class NonFiniteLossError : public NumericError {
 public:
  NonFiniteLossError(uint64_t epoch, size_t batch, uint64_t step);

  uint64_t epoch() const { return epoch_; }
  size_t batch() const { return batch_; }
  uint64_t step() const { return step_; }

 private:
  uint64_t epoch_;
  size_t batch_;
  uint64_t step_;
};

// Mean squared error over all elements; DimensionError on a shape mismatch.
template <typename S>
Tensor<S> MeanSquaredError(const Tensor<S>& prediction,
                           const Tensor<S>& target) {
  return MseLoss(prediction, target);
}

// Patch order of an epoch: a permutation of 0..count-1 that depends only on
// (seed, epoch).
std::vector<size_t> EpochOrder(uint64_t seed, uint64_t epoch, size_t count);

// Dropout stream for one optimizer step; depends only on (seed, step).
std::mt19937_64 StepGenerator(uint64_t seed, uint64_t step);

// Runs epochs state.epoch .. config.epochs - 1 with config.adam replacing
// the state's optimizer options. Each batch averages the
// per-patch MSE losses, backpropagates and applies one Adam step; the
// trailing partial batch of an epoch is kept. Appends each epoch's mean
// batch loss to state.loss_curve and calls `on_epoch` after it.
void Train(TrainingState& state, const PatchSet& data,
           const TrainConfig& config,
           const std::function<void(const TrainingState&)>& on_epoch = {});

// Mean evaluation-mode (no dropout) MSE over every patch.
double EvaluateLoss(const AfilmNet<float>& model, const PatchSet& data);

// Checkpoint file: "AFSR", u32 version, u32 tensor count, then per tensor
// u16 name length, name, u8 rank, u32 dims, f32 values. Model tensors use
// their parameter names; "config/", "adam." and "train/" prefixes hold the
// model configuration, the optimizer moments and options, and the run
// counters and loss curve. 64-bit integers and doubles are stored as the
// raw bits of pairs of f32 slots.
inline constexpr uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path,
                    const TrainingState& state);

// Rebuilds the state with the model configuration stored in the file.
TrainingState LoadCheckpoint(const std::filesystem::path& path);

// Loads into a model built from `expected`. ShapeMismatchError names the
// first tensor that is missing or differs in shape.
TrainingState LoadCheckpoint(const std::filesystem::path& path,
                             const ModelConfig& expected);

}  // namespace afsr

#endif  // AFSR_TRAINER_H_
