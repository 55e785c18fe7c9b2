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
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "afsr/dsp/audio.h"
#include "afsr/error.h"
#include "doctest.h"

namespace afsr::cli {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("afsr_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void WriteTone(const fs::path& path, double freq, size_t n) {
  AudioSignal s;
  s.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    s.samples[i] = 0.2 * std::sin(2 * std::numbers::pi * freq * double(i) /
                                  s.sample_rate_hz) +
                   0.1 * std::sin(2 * std::numbers::pi * 3 * freq *
                                  double(i) / s.sample_rate_hz);
  }
  WriteWav(path, s);
}

constexpr const char* kTinyConfig =
    "# tiny network for tests\n"
    "blocks = 8\n"
    "filters_log2_offset = 1\n"
    "max_filters = 8\n"
    "length_log2_offset = 3\n"
    "min_filter_length = 3\n"
    "final_filter_length = 3\n"
    "transformer_layers = 1\n"
    "heads = 2\n"
    "ffn_hidden = 8\n"
    "batch_size = 4\n"
    "epochs = 1\n"
    "seed = 11\n";

int Call(std::vector<std::string> args, std::string* out = nullptr,
         std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = Run(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

TEST_CASE("config parsing reads every key and reports the line") {
  const RunConfig c = ParseConfig(
      "depth = 3\n\n  learning_rate=2.5e-4 # comment\nafilm_enabled = false\n"
      "seed = 18446744073709551615\ndropout_rate = 0.25\n",
      "x.cfg");
  CHECK(c.model.depth == 3);
  CHECK(c.train.adam.learning_rate == 2.5e-4);
  CHECK_FALSE(c.model.afilm_enabled);
  CHECK(c.train.seed == 18446744073709551615ull);
  CHECK(c.model.dropout_rate == 0.25f);
  CHECK(c.explicit_keys.size() == 5);
  CHECK(c.explicit_keys.count("depth") == 1);

  auto message = [](const char* text) {
    try {
      ParseConfig(text, "x.cfg");
    } catch (const ParameterError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("depth = 3\nwidth = 2\n").find("x.cfg:2") != std::string::npos);
  CHECK(message("depth = 3\ndepth = 4\n").find("duplicate") !=
        std::string::npos);
  CHECK(message("depth = three\n").find("x.cfg:1") != std::string::npos);
  CHECK(message("depth 3\n").find("x.cfg:1") != std::string::npos);
  CHECK(message("epochs = 5x\n") != "");
}

TEST_CASE("config entries parse back to the same config") {
  RunConfig c = ParseConfig(kTinyConfig, "tiny");
  c.train.adam.learning_rate = 0.1 + 0.2;
  std::string text;
  for (const auto& [k, v] : ConfigEntries(c)) text += k + " = " + v + "\n";
  const RunConfig back = ParseConfig(text, "again");
  CHECK(ConfigEntries(back) == ConfigEntries(c));
  CHECK(back.train.adam.learning_rate == c.train.adam.learning_rate);
}

TEST_CASE("seed override comes from the environment") {
  RunConfig c;
  ::setenv("AFSR_SEED", "42", 1);
  CHECK(ApplySeedOverride(c));
  CHECK(c.train.seed == 42);
  ::setenv("AFSR_SEED", "-1", 1);
  CHECK_THROWS_AS(ApplySeedOverride(c), ParameterError);
  ::unsetenv("AFSR_SEED");
  CHECK_FALSE(ApplySeedOverride(c));
}

TEST_CASE("usage errors exit with 1 and help exits with 0") {
  std::string out, err;
  CHECK(Call({}, &out, &err) == kExitUsage);
  CHECK(err.find("Usage") != std::string::npos);
  CHECK(Call({"--help"}, &out) == kExitOk);
  CHECK(out.find("spectrogram") != std::string::npos);
  CHECK(Call({"--version"}, &out) == kExitOk);
  CHECK(out == std::string(kToolVersion) + "\n");
  CHECK(Call({"prepare", "--in", "x"}) == kExitUsage);
  CHECK(Call({"prepare", "--in", "x", "--out", "y", "--scale", "two"}) ==
        kExitUsage);
  CHECK(Call({"frobnicate"}) == kExitUsage);
}

TEST_CASE("prepare reports bad inputs per file") {
  const fs::path dir = Scratch("prepare");
  std::string err;
  CHECK(Call({"prepare", "--in", (dir / "missing").string(), "--out",
              (dir / "o1").string()},
             nullptr, &err) == kExitData);

  fs::create_directories(dir / "empty");
  CHECK(Call({"prepare", "--in", (dir / "empty").string(), "--out",
              (dir / "o2").string()},
             nullptr, &err) == kExitOk);
  CHECK(err.find("warning") != std::string::npos);
  CHECK(fs::exists(dir / "o2" / "patches.afsp"));

  fs::create_directories(dir / "mixed");
  WriteTone(dir / "mixed" / "a.wav", 440, 4000);
  std::ofstream(dir / "mixed" / "b.wav") << "not a wave file";
  WriteTone(dir / "mixed" / "c.WAV", 660, 4000);
  CHECK(Call({"prepare", "--in", (dir / "mixed").string(), "--out",
              (dir / "o3").string(), "--patch", "512", "--stride", "512"},
             nullptr, &err) == kExitData);
  CHECK(err.find("b.wav") != std::string::npos);
  CHECK(err.find("a.wav") == std::string::npos);
  const std::string files = Slurp(dir / "o3" / "files.txt");
  CHECK(files == "0\ta.wav\n1\tb.wav\n2\tc.WAV\n");
  CHECK(fs::exists(dir / "o3" / "manifest.json"));

  CHECK(Call({"prepare", "--in", (dir / "mixed").string(), "--out",
              (dir / "o4").string(), "--scale", "1"}) == kExitUsage);
}

TEST_CASE("prepare, train, eval, infer and spectrogram run end to end") {
  const fs::path dir = Scratch("pipeline");
  fs::create_directories(dir / "wav");
  WriteTone(dir / "wav" / "a.wav", 300, 4096);
  WriteTone(dir / "wav" / "b.wav", 500, 3000);
  std::ofstream(dir / "tiny.cfg") << kTinyConfig;
  const std::string prep = (dir / "prep").string();
  const std::string ckpt = (dir / "model.ckpt").string();
  std::string out, err;

  REQUIRE(Call({"prepare", "--in", (dir / "wav").string(), "--out", prep,
                "--patch", "512", "--stride", "256"}) == kExitOk);
  REQUIRE(Call({"train", "--data", prep + "/patches.afsp", "--config",
                (dir / "tiny.cfg").string(), "--out", ckpt, "--epochs", "2"},
               &out, &err) == kExitOk);
  CHECK(out.find("epoch 2 loss") != std::string::npos);
  const std::string losses = Slurp(ckpt + ".loss.txt");
  CHECK(losses.rfind("1 ", 0) == 0);
  CHECK(losses.find("\n2 ") != std::string::npos);
  const std::string manifest = Slurp(ckpt + ".manifest.json");
  CHECK(manifest.find("\"patch_length\": \"512\"") != std::string::npos);
  CHECK(manifest.find("\"epochs\": \"2\"") != std::string::npos);

  SUBCASE("eval writes model and bicubic rows") {
    const std::string report = (dir / "report.csv").string();
    REQUIRE(Call({"eval", "--ckpt", ckpt, "--data", (dir / "wav").string(),
                  "--out", report, "--dataset", "tones"}) == kExitOk);
    const std::string csv = Slurp(report);
    CHECK(csv.rfind("method,scale,dataset,item,count,snr_db,lsd\n", 0) == 0);
    CHECK(csv.find("model,2,tones,a.wav,1,") != std::string::npos);
    CHECK(csv.find("bicubic,2,tones,mean,2,") != std::string::npos);
    CHECK(Call({"eval", "--ckpt", ckpt, "--data", (dir / "wav").string()},
               &out) == kExitOk);
    CHECK(out.find("model,2,wav,mean,2,") != std::string::npos);
    CHECK(Call({"eval", "--ckpt", ckpt, "--data", (dir / "wav").string(),
                "--scale", "4"},
               nullptr, &err) == kExitUsage);
    CHECK(err.find("scale 2") != std::string::npos);
  }

  SUBCASE("infer doubles the sample rate") {
    const fs::path up = dir / "up.wav";
    REQUIRE(Call({"infer", "--ckpt", ckpt, "--in",
                  (dir / "wav" / "b.wav").string(), "--out", up.string()}) ==
            kExitOk);
    const AudioSignal y = ReadWav(up);
    CHECK(y.sample_rate_hz == 32000);
    CHECK(y.size() == 6000);
    CHECK(fs::exists(up.string() + ".manifest.json"));
  }

  SUBCASE("spectrogram picks the format from the extension") {
    const fs::path wav = dir / "wav" / "a.wav";
    REQUIRE(Call({"spectrogram", "--in", wav.string(), "--out",
                  (dir / "s.csv").string(), "--frame", "256", "--hop",
                  "128"}) == kExitOk);
    const std::string csv = Slurp(dir / "s.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);
    REQUIRE(Call({"spectrogram", "--in", wav.string(), "--out",
                  (dir / "s.pgm").string()}) == kExitOk);
    CHECK(Slurp(dir / "s.pgm").rfind("P5", 0) == 0);
    CHECK(Call({"spectrogram", "--in", wav.string(), "--out",
                (dir / "s.png").string()}) == kExitUsage);
  }

  SUBCASE("rerun reproduces the checkpoint byte for byte") {
    const std::string first = Slurp(ckpt);
    fs::remove(ckpt);
    REQUIRE(Call({"rerun", ckpt + ".manifest.json"}) == kExitOk);
    CHECK(Slurp(ckpt) == first);
  }

  SUBCASE("explicit settings must agree with the archive") {
    std::ofstream(dir / "clash.cfg") << kTinyConfig << "patch_length = 1024\n";
    CHECK(Call({"train", "--data", prep + "/patches.afsp", "--config",
                (dir / "clash.cfg").string(), "--out",
                (dir / "x.ckpt").string()},
               nullptr, &err) == kExitUsage);
    CHECK(err.find("archive") != std::string::npos);
  }

  SUBCASE("damaged inputs exit with 2") {
    CHECK(Call({"train", "--data", ckpt, "--out",
                (dir / "x.ckpt").string()}) == kExitData);
    std::string bytes = Slurp(ckpt);
    bytes.resize(bytes.size() / 2);
    std::ofstream(dir / "half.ckpt", std::ios::binary) << bytes;
    CHECK(Call({"eval", "--ckpt", (dir / "half.ckpt").string(), "--data",
                (dir / "wav").string()}) == kExitData);
    CHECK(Call({"rerun", (dir / "tiny.cfg").string()}) == kExitData);
  }
}

}  // namespace
}  // namespace afsr::cli
