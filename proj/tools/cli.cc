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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "afsr/dsp/audio.h"
#include "afsr/dsp/patches.h"
#include "afsr/dsp/resample.h"
#include "afsr/dsp/stft.h"
#include "afsr/error.h"
#include "afsr/metrics.h"
#include "afsr/net/inference.h"
#include "json.hpp"

namespace afsr::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct KeySpec {
  const char* name;
  std::function<bool(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

KeySpec IntKey(const char* name, int ModelConfig::*field) {
  return {name,
          [field](RunConfig& c, std::string_view v) {
            return ParseNumber(v, c.model.*field);
          },
          [field](const RunConfig& c) {
            return std::to_string(c.model.*field);
          }};
}

KeySpec TrainIntKey(const char* name, int TrainConfig::*field) {
  return {name,
          [field](RunConfig& c, std::string_view v) {
            return ParseNumber(v, c.train.*field);
          },
          [field](const RunConfig& c) {
            return std::to_string(c.train.*field);
          }};
}

KeySpec AdamKey(const char* name, double AdamOptions::*field) {
  return {name,
          [field](RunConfig& c, std::string_view v) {
            return ParseNumber(v, c.train.adam.*field);
          },
          [field](const RunConfig& c) {
            return FormatDouble(c.train.adam.*field);
          }};
}

const std::vector<KeySpec>& Keys() {
  static const std::vector<KeySpec> keys = {
      IntKey("depth", &ModelConfig::depth),
      IntKey("blocks", &ModelConfig::blocks),
      IntKey("transformer_layers", &ModelConfig::transformer_layers),
      IntKey("heads", &ModelConfig::heads),
      IntKey("ffn_hidden", &ModelConfig::ffn_hidden),
      {"dropout_rate",
       [](RunConfig& c, std::string_view v) {
         return ParseNumber(v, c.model.dropout_rate);
       },
       [](const RunConfig& c) { return FormatDouble(c.model.dropout_rate); }},
      IntKey("upscale", &ModelConfig::upscale),
      IntKey("patch_length", &ModelConfig::patch_length),
      IntKey("filters_log2_offset", &ModelConfig::filters_log2_offset),
      IntKey("max_filters", &ModelConfig::max_filters),
      IntKey("length_log2_offset", &ModelConfig::length_log2_offset),
      IntKey("min_filter_length", &ModelConfig::min_filter_length),
      IntKey("final_filter_length", &ModelConfig::final_filter_length),
      {"afilm_enabled",
       [](RunConfig& c, std::string_view v) {
         if (v == "true" || v == "1") {
           c.model.afilm_enabled = true;
         } else if (v == "false" || v == "0") {
           c.model.afilm_enabled = false;
         } else {
           return false;
         }
         return true;
       },
       [](const RunConfig& c) {
         return std::string(c.model.afilm_enabled ? "true" : "false");
       }},
      TrainIntKey("epochs", &TrainConfig::epochs),
      TrainIntKey("batch_size", &TrainConfig::batch_size),
      AdamKey("learning_rate", &AdamOptions::learning_rate),
      AdamKey("beta1", &AdamOptions::beta1),
      AdamKey("beta2", &AdamOptions::beta2),
      AdamKey("epsilon", &AdamOptions::epsilon),
      {"seed",
       [](RunConfig& c, std::string_view v) {
         return ParseNumber(v, c.train.seed);
       },
       [](const RunConfig& c) { return std::to_string(c.train.seed); }},
      TrainIntKey("checkpoint_every", &TrainConfig::checkpoint_every),
  };
  return keys;
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<fs::path> WavFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError(dir.string() + ": no such directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

fs::path Sibling(const fs::path& path, const std::string& suffix) {
  return fs::path(path.string() + suffix);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

Json ConfigJson(const RunConfig& config) {
  Json j = Json::object();
  for (const auto& [k, v] : ConfigEntries(config)) j[k] = v;
  return j;
}

void WriteManifest(const fs::path& path, const std::string& command,
                   const Json& options, const Json& config, uint64_t seed,
                   const std::vector<fs::path>& inputs,
                   const std::vector<fs::path>& outputs) {
  Json m;
  m["tool"] = "afsr";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["options"] = options;
  if (!config.is_null()) m["config"] = config;
  m["seed"] = seed;
  Json in = Json::array(), out = Json::array();
  for (const auto& p : inputs) in.push_back(p.string());
  for (const auto& p : outputs) out.push_back(p.string());
  m["inputs"] = in;
  m["outputs"] = out;
  WriteText(path, m.dump(2) + "\n");
}

// Runs `body`, mapping library errors to exit codes.
int Guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

void RequireScale(const TrainingState& state, int scale) {
  const int trained = state.model.config().upscale;
  if (trained != scale) {
    throw ParameterError("checkpoint was trained for scale " +
                         std::to_string(trained) + ", refusing scale " +
                         std::to_string(scale));
  }
}

Json PrepareJson(const PrepareOptions& o) {
  return {{"in", o.in_dir.string()},
          {"out", o.out_dir.string()},
          {"scale", o.scale},
          {"patch", o.patch},
          {"stride", o.stride}};
}

Json TrainJson(const TrainOptions& o) {
  return {{"data", o.data.string()},
          {"config", o.config.string()},
          {"out", o.out.string()},
          {"epochs", o.epochs}};
}

Json EvalJson(const EvalOptions& o) {
  return {{"ckpt", o.checkpoint.string()},
          {"data", o.data_dir.string()},
          {"scale", o.scale},
          {"out", o.out.string()},
          {"dataset", o.dataset}};
}

Json InferJson(const InferOptions& o) {
  return {{"ckpt", o.checkpoint.string()},
          {"in", o.in.string()},
          {"out", o.out.string()},
          {"scale", o.scale}};
}

Json SpectrogramJson(const SpectrogramOptions& o) {
  return {{"in", o.in.string()},
          {"out", o.out.string()},
          {"frame", o.frame},
          {"hop", o.hop}};
}

}  // namespace

RunConfig ParseConfig(std::string_view text, const std::string& source) {
  RunConfig config;
  std::map<std::string_view, const KeySpec*> index;
  for (const auto& k : Keys()) index[k.name] = &k;
  size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError(where + "expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) {
      throw ParameterError(where + "unknown key '" + key + "'");
    }
    if (!config.explicit_keys.insert(key).second) {
      throw ParameterError(where + "duplicate key '" + key + "'");
    }
    if (!it->second->set(config, value)) {
      throw ParameterError(where + "invalid value '" + std::string(value) +
                           "' for " + key);
    }
  }
  return config;
}

RunConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : Keys()) out.emplace_back(k.name, k.get(config));
  return out;
}

bool ApplySeedOverride(RunConfig& config) {
  const char* env = std::getenv("AFSR_SEED");
  if (env == nullptr || *env == '\0') return false;
  uint64_t seed = 0;
  if (!ParseNumber(std::string_view(env), seed)) {
    throw ParameterError("AFSR_SEED is not an unsigned integer: " +
                         std::string(env));
  }
  config.train.seed = seed;
  return true;
}

int Prepare(const PrepareOptions& o, std::ostream& log, std::ostream& err) {
  return Guard(err, [&] {
    if (o.scale < 2) throw ParameterError("--scale must be at least 2");
    if (o.patch == 0 || o.stride == 0) {
      throw ParameterError("--patch and --stride must be positive");
    }
    const auto files = WavFiles(o.in_dir);
    fs::create_directories(o.out_dir);
    const fs::path archive = o.out_dir / "patches.afsp";
    const fs::path listing = o.out_dir / "files.txt";
    WriteManifest(o.out_dir / "manifest.json", "prepare", PrepareJson(o),
                  nullptr, 0, files, {archive, listing});
    if (files.empty()) {
      err << "warning: no .wav files in " << o.in_dir.string() << "\n";
    }

    PatchSet set;
    set.patch_length = uint32_t(o.patch);
    set.scale = uint32_t(o.scale);
    bool have_rate = false;
    size_t failures = 0;
    std::string names;
    for (size_t i = 0; i < files.size(); ++i) {
      try {
        const AudioSignal signal = ReadWav(files[i]);
        if (have_rate && uint32_t(signal.sample_rate_hz) != set.sample_rate_hz) {
          throw AlignmentError("sample rate " +
                               std::to_string(signal.sample_rate_hz) +
                               " differs from " +
                               std::to_string(set.sample_rate_hz));
        }
        PatchSet part =
            MakeTrainingPairs(signal, o.scale, o.patch, o.stride, uint32_t(i));
        set.sample_rate_hz = uint32_t(signal.sample_rate_hz);
        have_rate = true;
        if (part.patches.empty()) {
          err << "warning: " << files[i].filename().string()
              << " is shorter than one patch\n";
        }
        for (auto& p : part.patches) set.patches.push_back(std::move(p));
      } catch (const Error& e) {
        ++failures;
        err << "skipping " << files[i].string() << ": " << e.what() << "\n";
      }
      names += std::to_string(i) + "\t" + files[i].filename().string() + "\n";
    }
    SavePatchArchive(archive, set);
    WriteText(listing, names);
    log << "wrote " << set.patches.size() << " patch pairs from "
        << files.size() - failures << " of " << files.size() << " files to "
        << archive.string() << "\n";
    return failures > 0 ? kExitData : kExitOk;
  });
}

int Train(const TrainOptions& o, std::ostream& log, std::ostream& err) {
  return Guard(err, [&] {
    RunConfig config = o.config.empty() ? RunConfig{} : LoadConfig(o.config);
    if (ApplySeedOverride(config)) {
      log << "seed " << config.train.seed << " from AFSR_SEED\n";
    }
    return Train(o, config, log, err);
  });
}

int Train(const TrainOptions& o, const RunConfig& given, std::ostream& log,
          std::ostream& err) {
  return Guard(err, [&] {
    RunConfig config = given;
    if (o.epochs >= 0) config.train.epochs = o.epochs;
    const PatchSet data = LoadPatchArchive(o.data);
    auto adopt = [&](const char* key, int& field, uint32_t stored) {
      if (!config.explicit_keys.count(key)) {
        field = int(stored);
      } else if (uint32_t(field) != stored) {
        throw ParameterError(std::string(key) + " = " + std::to_string(field) +
                             " but the archive holds " +
                             std::to_string(stored));
      }
    };
    adopt("patch_length", config.model.patch_length, data.patch_length);
    adopt("upscale", config.model.upscale, data.scale);
    ValidateConfig(config.model);
    config.train.checkpoint_path =
        config.train.checkpoint_every > 0 ? o.out : fs::path();
    ValidateTrainConfig(config.train);

    const fs::path loss_log = Sibling(o.out, ".loss.txt");
    WriteManifest(Sibling(o.out, ".manifest.json"), "train", TrainJson(o),
                  ConfigJson(config), config.train.seed, {o.data, o.config},
                  {o.out, loss_log});
    if (data.patches.empty() && config.train.epochs > 0) {
      throw FormatError(o.data.string() + " holds no patches");
    }

    TrainingState state = TrainingState::Fresh(
        config.model, config.train.adam, config.train.seed);
    log << "model: " << CountParameters(state.model) << " parameters, "
        << data.patches.size() << " patches\n";
    std::string lines;
    auto record = [&](const TrainingState& s) {
      lines += std::to_string(s.epoch) + " " +
               FormatDouble(s.loss_curve.back()) + "\n";
      log << "epoch " << s.epoch << " loss "
          << FormatDouble(s.loss_curve.back()) << "\n";
    };
    try {
      afsr::Train(state, data, config.train, record);
    } catch (const NonFiniteLossError&) {
      WriteText(loss_log, lines);
      throw;
    }
    SaveCheckpoint(o.out, state);
    WriteText(loss_log, lines);
    log << "wrote " << o.out.string() << "\n";
    return kExitOk;
  });
}

int Eval(const EvalOptions& o, std::ostream& out, std::ostream& log,
         std::ostream& err) {
  return Guard(err, [&] {
    const TrainingState state = LoadCheckpoint(o.checkpoint);
    RequireScale(state, o.scale);
    const auto files = WavFiles(o.data_dir);
    std::string dataset = o.dataset;
    if (dataset.empty()) {
      dataset = o.data_dir.lexically_normal().filename().string();
      if (dataset.empty()) {
        dataset = o.data_dir.lexically_normal().parent_path().filename().string();
      }
    }
    if (!o.out.empty()) {
      WriteManifest(Sibling(o.out, ".manifest.json"), "eval", EvalJson(o),
                    nullptr, state.seed, files, {o.out});
    }
    const AfilmNet<float>& model = state.model;
    const EvalMethod learned{"model", [&model](std::span<const double> x) {
                               return RunPatched(model, x);
                             }};
    const EvalReport report =
        EvaluateCorpus(files, o.scale, dataset, {learned, BicubicMethod()});
    for (const auto& s : report.skipped) {
      err << "skipping " << s.item << ": " << s.reason << "\n";
    }
    for (const auto& a : report.Aggregates()) {
      if (a.infinite_snr > 0) {
        err << "warning: " << a.infinite_snr << " " << a.method
            << " item(s) with infinite SNR left out of the mean\n";
      }
    }
    if (o.out.empty()) {
      WriteReportCsv(out, report);
    } else {
      WriteReportCsv(o.out, report);
      log << "wrote " << o.out.string() << "\n";
    }
    return report.skipped.empty() ? kExitOk : kExitData;
  });
}

int Infer(const InferOptions& o, std::ostream& log, std::ostream& err) {
  return Guard(err, [&] {
    const TrainingState state = LoadCheckpoint(o.checkpoint);
    RequireScale(state, o.scale);
    WriteManifest(Sibling(o.out, ".manifest.json"), "infer", InferJson(o),
                  nullptr, state.seed, {o.checkpoint, o.in}, {o.out});
    const AudioSignal low = ReadWav(o.in);
    const AudioSignal up = CubicUpsample(low, o.scale);
    AudioSignal result{RunPatched(state.model, up.samples), up.sample_rate_hz};
    const size_t clipped = WriteWav(o.out, result);
    log << "wrote " << result.size() << " samples at " << result.sample_rate_hz
        << " Hz to " << o.out.string() << "\n";
    if (clipped > 0) {
      err << "warning: " << clipped << " samples clipped to [-1, 1)\n";
    }
    return kExitOk;
  });
}

int Spectrogram(const SpectrogramOptions& o, std::ostream& log,
                std::ostream& err) {
  return Guard(err, [&] {
    const std::string ext = o.out.extension().string();
    if (ext != ".pgm" && ext != ".csv") {
      throw ParameterError("--out must end in .pgm or .csv");
    }
    WriteManifest(Sibling(o.out, ".manifest.json"), "spectrogram",
                  SpectrogramJson(o), nullptr, 0, {o.in}, {o.out});
    const AudioSignal signal = ReadWav(o.in);
    const afsr::Spectrogram spec = StftLogPower(signal.samples, o.frame, o.hop);
    if (ext == ".pgm") {
      WriteSpectrogramPgm(o.out, spec);
    } else {
      WriteSpectrogramCsv(o.out, spec);
    }
    log << "wrote " << spec.frames << " x " << spec.bins << " log-power "
        << ext.substr(1) << " to " << o.out.string() << "\n";
    return kExitOk;
  });
}

int Rerun(const fs::path& manifest, std::ostream& out, std::ostream& log,
          std::ostream& err) {
  Json m;
  try {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw IoError("cannot open " + manifest.string());
    m = Json::parse(in);
  } catch (const Json::exception& e) {
    err << "error: " << manifest.string() << ": " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  try {
    const std::string command = m.at("command");
    const Json& opt = m.at("options");
    if (command == "prepare") {
      return Prepare({opt.at("in").get<std::string>(),
                      opt.at("out").get<std::string>(), opt.at("scale"),
                      opt.at("patch"), opt.at("stride")},
                     log, err);
    }
    if (command == "train") {
      std::string text;
      for (const auto& [key, value] : m.at("config").items()) {
        text += key + " = " + value.get<std::string>() + "\n";
      }
      const RunConfig config = ParseConfig(text, manifest.string());
      return Train({opt.at("data").get<std::string>(),
                    opt.at("config").get<std::string>(),
                    opt.at("out").get<std::string>(), opt.at("epochs")},
                   config, log, err);
    }
    if (command == "eval") {
      return Eval({opt.at("ckpt").get<std::string>(),
                   opt.at("data").get<std::string>(), opt.at("scale"),
                   opt.at("out").get<std::string>(), opt.at("dataset")},
                  out, log, err);
    }
    if (command == "infer") {
      return Infer({opt.at("ckpt").get<std::string>(),
                    opt.at("in").get<std::string>(),
                    opt.at("out").get<std::string>(), opt.at("scale")},
                   log, err);
    }
    if (command == "spectrogram") {
      return Spectrogram({opt.at("in").get<std::string>(),
                          opt.at("out").get<std::string>(), opt.at("frame"),
                          opt.at("hop")},
                         log, err);
    }
    err << "error: " << manifest.string() << ": unknown command '" << command
        << "'\n";
    return kExitData;
  } catch (const Json::exception& e) {
    err << "error: " << manifest.string() << ": " << e.what() << "\n";
    return kExitData;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Audio super-resolution with attention-based feature-wise "
               "linear modulation"};
  app.name("afsr");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  PrepareOptions prep;
  auto* prepare = app.add_subcommand(
      "prepare", "Cut WAV files into paired low/high-resolution patches");
  prepare->add_option("--in", prep.in_dir, "Directory of 16-bit PCM WAVs")
      ->required();
  prepare->add_option("--out", prep.out_dir, "Output directory")->required();
  prepare->add_option("--scale", prep.scale, "Upscaling factor r")
      ->capture_default_str();
  prepare->add_option("--patch", prep.patch, "Patch length in samples")
      ->capture_default_str();
  prepare->add_option("--stride", prep.stride, "Distance between patches")
      ->capture_default_str();

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a model on a patch archive");
  train->add_option("--data", tr.data, "Patch archive from prepare")
      ->required();
  train->add_option("--config", tr.config, "key = value settings file");
  train->add_option("--out", tr.out, "Checkpoint to write")->required();
  train->add_option("--epochs", tr.epochs, "Override the configured epochs");

  EvalOptions ev;
  auto* eval = app.add_subcommand(
      "eval", "Score a checkpoint and the bicubic baseline on a WAV directory");
  eval->add_option("--ckpt", ev.checkpoint, "Checkpoint")->required();
  eval->add_option("--data", ev.data_dir, "Directory of high-resolution WAVs")
      ->required();
  eval->add_option("--scale", ev.scale, "Upscaling factor r")
      ->capture_default_str();
  eval->add_option("--out", ev.out, "CSV report (default: stdout)");
  eval->add_option("--dataset", ev.dataset,
                   "Dataset label (default: directory name)");

  InferOptions inf;
  auto* infer = app.add_subcommand(
      "infer", "Upsample a low-resolution WAV with a trained model");
  infer->add_option("--ckpt", inf.checkpoint, "Checkpoint")->required();
  infer->add_option("--in", inf.in, "Low-resolution WAV")->required();
  infer->add_option("--out", inf.out, "Output WAV")->required();
  infer->add_option("--scale", inf.scale, "Upscaling factor r")
      ->capture_default_str();

  SpectrogramOptions sp;
  auto* spectrogram = app.add_subcommand(
      "spectrogram", "Write the log-power spectrogram of a WAV");
  spectrogram->add_option("--in", sp.in, "Input WAV")->required();
  spectrogram->add_option("--out", sp.out, "Output .pgm or .csv")->required();
  spectrogram->add_option("--frame", sp.frame, "Frame length")
      ->capture_default_str();
  spectrogram->add_option("--hop", sp.hop, "Hop length")->capture_default_str();

  fs::path manifest;
  auto* rerun = app.add_subcommand("rerun", "Repeat the run in a manifest");
  rerun->add_option("manifest", manifest, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty()
                              ? nullptr
                              : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  if (prepare->parsed()) return Prepare(prep, out, err);
  if (train->parsed()) return Train(tr, out, err);
  if (eval->parsed()) return Eval(ev, out, err, err);
  if (infer->parsed()) return Infer(inf, out, err);
  if (spectrogram->parsed()) return Spectrogram(sp, out, err);
  return Rerun(manifest, out, out, err);
}

}  // namespace afsr::cli
