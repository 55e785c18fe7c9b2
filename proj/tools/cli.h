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

#ifndef AFSR_TOOLS_CLI_H_
#define AFSR_TOOLS_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "afsr/net/config.h"
#include "afsr/trainer.h"

namespace afsr::cli {

namespace fs = std::filesystem;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kToolVersion = "1.0.0";

// Model and training settings from a flat `key = value` file.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::set<std::string> explicit_keys;  // keys the file actually set
};

// `#` starts a comment; blank lines are ignored. Unknown keys, duplicates
// and malformed values raise ParameterError naming `source` and the line.
RunConfig ParseConfig(std::string_view text, const std::string& source);
RunConfig LoadConfig(const fs::path& path);

// Every key with its resolved value, in a fixed order, as text.
std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const RunConfig& config);

// AFSR_SEED, when set, replaces the configured seed. Returns true if it did.
bool ApplySeedOverride(RunConfig& config);

struct PrepareOptions {
  fs::path in_dir;
  fs::path out_dir;
  int scale = 2;
  size_t patch = 8192;
  size_t stride = 4096;
};

struct TrainOptions {
  fs::path data;
  fs::path config;  // optional
  fs::path out;
  int epochs = -1;  // >= 0 overrides the config
};

struct EvalOptions {
  fs::path checkpoint;
  fs::path data_dir;
  int scale = 2;
  fs::path out;  // empty writes the table to stdout
  std::string dataset;  // defaults to the directory name
};

struct InferOptions {
  fs::path checkpoint;
  fs::path in;
  fs::path out;
  int scale = 2;
};

struct SpectrogramOptions {
  fs::path in;
  fs::path out;  // .pgm or .csv
  size_t frame = 2048;
  size_t hop = 512;
};

// Each command writes its manifest before the long-running work and
// returns an exit code. Progress goes to `log`, diagnostics to `err`.
int Prepare(const PrepareOptions& options, std::ostream& log,
            std::ostream& err);
int Train(const TrainOptions& options, std::ostream& log, std::ostream& err);
int Train(const TrainOptions& options, const RunConfig& config,
          std::ostream& log, std::ostream& err);
int Eval(const EvalOptions& options, std::ostream& out, std::ostream& log,
         std::ostream& err);
int Infer(const InferOptions& options, std::ostream& log, std::ostream& err);
int Spectrogram(const SpectrogramOptions& options, std::ostream& log,
                std::ostream& err);

// Re-runs the command recorded in a manifest with its recorded settings.
int Rerun(const fs::path& manifest, std::ostream& out, std::ostream& log,
          std::ostream& err);

// Full command line, program name excluded.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace afsr::cli

#endif  // AFSR_TOOLS_CLI_H_
