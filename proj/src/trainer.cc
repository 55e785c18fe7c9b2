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

#include "afsr/trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "afsr/io/binary.h"
#include "afsr/ops.h"

namespace afsr {
namespace {

// Seeds a generator from a fixed-width tuple so streams never overlap by
// accident of arithmetic.
std::mt19937_64 DerivedGenerator(uint64_t seed, uint64_t index,
                                 uint32_t purpose) {
  std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(index),
                    uint32_t(index >> 32), purpose};
  return std::mt19937_64(seq);
}

constexpr uint32_t kShufflePurpose = 0x5348;
constexpr uint32_t kDropoutPurpose = 0x4452;

Tensor<float> PatchTensor(const std::vector<float>& samples) {
  return Tensor<float>::FromData({samples.size(), 1}, samples);
}

struct RawTensor {
  Shape shape;
  std::vector<float> values;
};

using TensorMap = std::map<std::string, RawTensor>;

std::vector<float> PackBits(const std::vector<uint64_t>& words) {
  std::vector<float> out;
  for (uint64_t w : words) {
    out.push_back(std::bit_cast<float>(uint32_t(w)));
    out.push_back(std::bit_cast<float>(uint32_t(w >> 32)));
  }
  return out;
}

std::vector<uint64_t> UnpackBits(const std::vector<float>& values) {
  std::vector<uint64_t> out;
  for (size_t i = 0; i + 1 < values.size(); i += 2) {
    out.push_back(uint64_t(std::bit_cast<uint32_t>(values[i])) |
                  uint64_t(std::bit_cast<uint32_t>(values[i + 1])) << 32);
  }
  return out;
}

std::vector<float> PackDoubles(const std::vector<double>& v) {
  std::vector<uint64_t> words;
  for (double d : v) words.push_back(std::bit_cast<uint64_t>(d));
  return PackBits(words);
}

std::vector<double> UnpackDoubles(const std::vector<float>& values) {
  std::vector<double> out;
  for (uint64_t w : UnpackBits(values)) out.push_back(std::bit_cast<double>(w));
  return out;
}

// Integer-valued configuration fields, in file order.
std::vector<std::pair<const char*, int ModelConfig::*>> IntFields() {
  return {{"depth", &ModelConfig::depth},
          {"blocks", &ModelConfig::blocks},
          {"transformer_layers", &ModelConfig::transformer_layers},
          {"heads", &ModelConfig::heads},
          {"ffn_hidden", &ModelConfig::ffn_hidden},
          {"upscale", &ModelConfig::upscale},
          {"patch_length", &ModelConfig::patch_length},
          {"filters_log2_offset", &ModelConfig::filters_log2_offset},
          {"max_filters", &ModelConfig::max_filters},
          {"length_log2_offset", &ModelConfig::length_log2_offset},
          {"min_filter_length", &ModelConfig::min_filter_length},
          {"final_filter_length", &ModelConfig::final_filter_length}};
}

void PutTensor(io::Writer& w, const std::string& name, const Shape& shape,
               std::span<const float> values) {
  w.U16(uint16_t(name.size()));
  w.Tag(name);
  w.U8(uint8_t(shape.size()));
  for (size_t d : shape) w.U32(uint32_t(d));
  w.Floats(values);
}

void PutVector(io::Writer& w, const std::string& name,
               const std::vector<float>& values) {
  PutTensor(w, name, {values.size()}, values);
}

TensorMap ReadTensors(const std::filesystem::path& path) {
  io::Reader r = io::Reader::FromFile(path);
  if (r.remaining() < 4 || r.String(4) != "AFSR") {
    throw FormatError(path.string() + ": not a checkpoint (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw VersionError(path.string() + ": checkpoint version " +
                       std::to_string(version) + ", expected " +
                       std::to_string(kCheckpointVersion));
  }
  const uint32_t count = r.U32();
  TensorMap tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.String(r.U16());
    RawTensor t;
    t.shape.resize(r.U8());
    for (size_t& d : t.shape) d = r.U32();
    const size_t n = t.shape.empty() ? 1 : NumElements(t.shape);
    if (n > r.remaining() / 4) {
      throw TruncatedFileError(path.string() + ": truncated file in tensor " +
                               name);
    }
    t.values.resize(n);
    r.Floats(t.values);
    if (!tensors.emplace(name, std::move(t)).second) {
      throw FormatError(path.string() + ": duplicate tensor " + name);
    }
  }
  if (r.remaining() != 0) {
    throw FormatError(path.string() + ": " + std::to_string(r.remaining()) +
                      " trailing bytes");
  }
  return tensors;
}

const RawTensor& Require(const TensorMap& tensors, const std::string& name,
                         const std::filesystem::path& path) {
  auto it = tensors.find(name);
  if (it == tensors.end()) {
    throw ShapeMismatchError(path.string() + ": missing tensor " + name);
  }
  return it->second;
}

ModelConfig ConfigFromTensors(const TensorMap& tensors,
                              const std::filesystem::path& path) {
  ModelConfig config;
  for (const auto& [name, field] : IntFields()) {
    const RawTensor& t = Require(tensors, std::string("config/") + name, path);
    config.*field = int(t.values.at(0));
  }
  config.dropout_rate = Require(tensors, "config/dropout_rate", path).values.at(0);
  config.afilm_enabled =
      Require(tensors, "config/afilm_enabled", path).values.at(0) != 0.0f;
  return config;
}

void CopyInto(const RawTensor& raw, const std::string& name,
              const Shape& expected, std::span<float> dst,
              const std::filesystem::path& path) {
  if (raw.shape != expected) {
    throw ShapeMismatchError(path.string() + ": tensor " + name + " has shape " +
                             ShapeToString(raw.shape) + ", model expects " +
                             ShapeToString(expected));
  }
  std::copy(raw.values.begin(), raw.values.end(), dst.begin());
}

TrainingState StateFromTensors(const TensorMap& tensors,
                               const ModelConfig& config,
                               const std::filesystem::path& path) {
  const auto options = UnpackDoubles(Require(tensors, "adam.options", path).values);
  const auto counters = UnpackBits(Require(tensors, "train/counters", path).values);
  if (options.size() != 4 || counters.size() != 4) {
    throw FormatError(path.string() + ": malformed optimizer or counters");
  }
  TrainingState state = TrainingState::Fresh(
      config, {options[0], options[1], options[2], options[3]}, counters[0]);
  state.epoch = counters[1];
  state.step = counters[2];
  state.adam.step = counters[3];
  state.loss_curve =
      UnpackDoubles(Require(tensors, "train/loss_curve", path).values);

  const auto params = state.model.Parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    Tensor<float> target = p.tensor;
    const Shape& shape = target.shape();
    CopyInto(Require(tensors, p.name, path), p.name, shape, target.data(),
             path);
    const std::string m = "adam.m/" + p.name, v = "adam.v/" + p.name;
    CopyInto(Require(tensors, m, path), m, shape, state.adam.first_moment[i],
             path);
    CopyInto(Require(tensors, v, path), v, shape, state.adam.second_moment[i],
             path);
  }
  return state;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.epochs < 0) throw ParameterError("epochs must be >= 0");
  if (config.batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (!(config.adam.learning_rate > 0.0)) {
    throw ParameterError("learning_rate must be > 0");
  }
  if (!(config.adam.beta1 >= 0.0 && config.adam.beta1 < 1.0) ||
      !(config.adam.beta2 >= 0.0 && config.adam.beta2 < 1.0)) {
    throw ParameterError("adam betas must lie in [0, 1)");
  }
  if (!(config.adam.epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (config.checkpoint_every < 0) {
    throw ParameterError("checkpoint_every must be >= 0");
  }
  if (config.checkpoint_every > 0 && config.checkpoint_path.empty()) {
    throw ParameterError("checkpoint_every needs a checkpoint path");
  }
}

TrainingState TrainingState::Fresh(const ModelConfig& model_config,
                                   const AdamOptions& adam, uint64_t seed) {
  AfilmNet<float> model(model_config, seed);
  const auto params = model.ParameterTensors();
  AdamState<float> adam_state(adam, params);
  return {std::move(model), std::move(adam_state), seed, 0, 0, {}};
}

NonFiniteLossError::NonFiniteLossError(uint64_t epoch, size_t batch,
                                       uint64_t step)
    : NumericError("non-finite loss in epoch " + std::to_string(epoch) +
                   ", batch " + std::to_string(batch) + " (step " +
                   std::to_string(step) + ")"),
      epoch_(epoch),
      batch_(batch),
      step_(step) {}

std::vector<size_t> EpochOrder(uint64_t seed, uint64_t epoch, size_t count) {
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t{0});
  auto rng = DerivedGenerator(seed, epoch, kShufflePurpose);
  // Fisher-Yates with an explicit draw, so the order does not depend on the
  // standard library's shuffle.
  for (size_t i = count; i > 1; --i) {
    const size_t j = size_t(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::mt19937_64 StepGenerator(uint64_t seed, uint64_t step) {
  return DerivedGenerator(seed, step, kDropoutPurpose);
}

void Train(TrainingState& state, const PatchSet& data,
           const TrainConfig& config,
           const std::function<void(const TrainingState&)>& on_epoch) {
  ValidateTrainConfig(config);
  if (!data.patches.empty()) {
    ValidateInputLength(state.model.config(), data.patch_length);
  }
  state.adam.options = config.adam;
  auto params = state.model.ParameterTensors();
  const size_t batch_size = size_t(config.batch_size);
  while (state.epoch < uint64_t(config.epochs)) {
    const auto order = EpochOrder(state.seed, state.epoch, data.patches.size());
    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t begin = 0; begin < order.size(); begin += batch_size) {
      const size_t end = std::min(order.size(), begin + batch_size);
      const float weight = 1.0f / float(end - begin);
      for (auto& p : params) p.ZeroGrad();
      auto rng = StepGenerator(state.seed, state.step);
      double batch_loss = 0.0;
      for (size_t i = begin; i < end; ++i) {
        const Patch& patch = data.patches[order[i]];
        const Tensor<float> pred =
            state.model.Forward(PatchTensor(patch.lowres), true, &rng);
        const Tensor<float> loss =
            Scale(MseLoss(pred, PatchTensor(patch.highres)), weight);
        batch_loss += double(loss.item());
        Backward(loss);
      }
      if (!std::isfinite(batch_loss)) {
        for (auto& p : params) p.ZeroGrad();
        throw NonFiniteLossError(state.epoch, batches, state.step);
      }
      AdamStep<float>(params, state.adam);
      ++state.step;
      epoch_loss += batch_loss;
      ++batches;
    }
    for (auto& p : params) p.ZeroGrad();
    state.loss_curve.push_back(batches > 0 ? epoch_loss / double(batches)
                                           : 0.0);
    ++state.epoch;
    if (config.checkpoint_every > 0 &&
        state.epoch % uint64_t(config.checkpoint_every) == 0) {
      SaveCheckpoint(config.checkpoint_path, state);
    }
    if (on_epoch) on_epoch(state);
  }
}

double EvaluateLoss(const AfilmNet<float>& model, const PatchSet& data) {
  if (data.patches.empty()) return 0.0;
  NoGradGuard no_grad;
  double total = 0.0;
  for (const Patch& patch : data.patches) {
    total += double(
        MseLoss(model.Forward(PatchTensor(patch.lowres), false),
                PatchTensor(patch.highres))
            .item());
  }
  return total / double(data.patches.size());
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const TrainingState& state) {
  const ModelConfig& config = state.model.config();
  const auto params = state.model.Parameters();
  io::Writer w;
  w.Tag("AFSR");
  w.U32(kCheckpointVersion);
  const auto fields = IntFields();
  w.U32(uint32_t(params.size() * 3 + fields.size() + 2 + 3));
  for (const auto& p : params) {
    PutTensor(w, p.name, p.tensor.shape(), p.tensor.data());
  }
  for (const auto& [name, field] : fields) {
    PutVector(w, std::string("config/") + name, {float(config.*field)});
  }
  PutVector(w, "config/dropout_rate", {config.dropout_rate});
  PutVector(w, "config/afilm_enabled", {config.afilm_enabled ? 1.0f : 0.0f});
  const AdamOptions& o = state.adam.options;
  PutVector(w, "adam.options",
            PackDoubles({o.learning_rate, o.beta1, o.beta2, o.epsilon}));
  for (size_t i = 0; i < params.size(); ++i) {
    PutTensor(w, "adam.m/" + params[i].name, params[i].tensor.shape(),
              state.adam.first_moment[i]);
    PutTensor(w, "adam.v/" + params[i].name, params[i].tensor.shape(),
              state.adam.second_moment[i]);
  }
  PutVector(w, "train/counters",
            PackBits({state.seed, state.epoch, state.step, state.adam.step}));
  PutVector(w, "train/loss_curve", PackDoubles(state.loss_curve));
  w.WriteTo(path);
}

TrainingState LoadCheckpoint(const std::filesystem::path& path) {
  const TensorMap tensors = ReadTensors(path);
  return StateFromTensors(tensors, ConfigFromTensors(tensors, path), path);
}

TrainingState LoadCheckpoint(const std::filesystem::path& path,
                             const ModelConfig& expected) {
  return StateFromTensors(ReadTensors(path), expected, path);
}

}  // namespace afsr
