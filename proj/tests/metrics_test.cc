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

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "afsr/dsp/resample.h"
#include "afsr/error.h"
#include "afsr/metrics.h"
#include "afsr/net/inference.h"
#include "afsr/net/model.h"
#include "doctest.h"
#include "test_util.h"

namespace afsr {
namespace {

using testing::RandomVector;

// Log-spectral distance written straight from the definition: Hann window,
// direct DFT sums, natural log of power plus the floor, per-frame root,
// mean over frames.
double LsdOracle(const std::vector<double>& x, const std::vector<double>& y,
                 size_t n, size_t hop) {
  const size_t frames = (y.size() - n) / hop + 1;
  const size_t bins = n / 2 + 1;
  double total = 0.0;
  for (size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (size_t k = 0; k < bins; ++k) {
      std::complex<double> sx = 0.0, sy = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double w =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n));
        const std::complex<double> e = std::polar(
            1.0, -2.0 * std::numbers::pi * double(k * i) / double(n));
        sx += w * x[t * hop + i] * e;
        sy += w * y[t * hop + i] * e;
      }
      const double d = std::log(std::norm(sy) + 1e-10) -
                       std::log(std::norm(sx) + 1e-10);
      sum += d * d;
    }
    total += std::sqrt(sum / double(bins));
  }
  return total / double(frames);
}

AudioSignal Tones(const std::vector<double>& freqs, size_t n) {
  AudioSignal s;
  s.samples.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < freqs.size(); ++k) {
      s.samples[i] += 0.2 * std::sin(2.0 * std::numbers::pi * freqs[k] *
                                         double(i) / 16000.0 +
                                     double(k));
    }
  }
  return s;
}

TEST_CASE("snr on constructed ratios") {
  const std::vector<double> y = {3.0, 1.0};
  CHECK(Snr(y, y).infinite);
  const std::vector<double> doubled = {6.0, 2.0};
  const SnrDb zero = Snr(doubled, y);
  CHECK_FALSE(zero.infinite);
  CHECK(zero.value == 0.0);
  const std::vector<double> tenth = {4.0, 1.0};
  CHECK(Snr(tenth, y).value == 10.0);

  std::mt19937_64 rng(1);
  const auto ref = RandomVector(100, rng);
  const auto noise = RandomVector(100, rng);
  double ey = 0, en = 0;
  for (size_t i = 0; i < 100; ++i) {
    ey += ref[i] * ref[i];
    en += noise[i] * noise[i];
  }
  const double scale = std::sqrt(ey / en / 10.0);
  std::vector<double> x(100);
  for (size_t i = 0; i < 100; ++i) x[i] = ref[i] + scale * noise[i];
  CHECK(Snr(x, ref).value == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("snr errors, scaling invariance and the noise ladder") {
  CHECK_THROWS_AS(Snr(std::vector<double>{1, 2}, std::vector<double>{1}),
                  DimensionError);
  CHECK_THROWS_AS(Snr(std::vector<double>{1, 2}, std::vector<double>{0, 0}),
                  NumericError);

  std::mt19937_64 rng(4);
  const auto y = RandomVector(256, rng);
  const auto noise = RandomVector(256, rng);
  std::vector<double> x(256);
  for (size_t i = 0; i < 256; ++i) x[i] = y[i] + 0.1 * noise[i];
  const double base = Snr(x, y).value;
  for (double alpha : {-3.0, 0.25, 7.5}) {
    std::vector<double> ax(256), ay(256);
    for (size_t i = 0; i < 256; ++i) {
      ax[i] = alpha * x[i];
      ay[i] = alpha * y[i];
    }
    CHECK(Snr(ax, ay).value == doctest::Approx(base).epsilon(1e-12));
  }

  double previous = INFINITY;
  for (int level = 1; level <= 10; ++level) {
    for (size_t i = 0; i < 256; ++i) x[i] = y[i] + 0.05 * level * noise[i];
    const double snr = Snr(x, y).value;
    CHECK(snr < previous);
    previous = snr;
  }
}

TEST_CASE("lsd on identical and offset spectra") {
  std::mt19937_64 rng(7);
  const auto y = RandomVector(4096, rng);
  CHECK(Lsd(y, y) == 0.0);

  Spectrogram a;
  a.frames = 5;
  a.bins = 9;
  a.values = RandomVector(45, rng, -5, 5);
  for (double c : {0.75, -2.5}) {
    Spectrogram b = a;
    for (double& v : b.values) v += c;
    CHECK(Lsd(b, a) == doctest::Approx(std::abs(c)).epsilon(1e-12));
  }
  Spectrogram wrong = a;
  wrong.bins = 8;
  wrong.values.resize(40);
  CHECK_THROWS_AS(Lsd(wrong, a), DimensionError);
  CHECK_THROWS_AS(Lsd(std::vector<double>(100), std::vector<double>(100)),
                  ParameterError);
}

TEST_CASE("lsd matches the direct double loop") {
  for (uint64_t s = 0; s < 5; ++s) {
    std::mt19937_64 rng(s);
    const auto x = RandomVector(100, rng);
    const auto y = RandomVector(100, rng);
    for (size_t n : {16, 12}) {
      const double got = Lsd(x, y, n, 5);
      CHECK(std::abs(got - LsdOracle(x, y, n, 5)) < 1e-8);
      CHECK(got == Lsd(y, x, n, 5));
      CHECK(got >= 0.0);
    }
  }
}

TEST_CASE("corpus evaluation aggregates and baselines") {
  std::vector<AudioSignal> signals = {Tones({440, 1250, 2100}, 16000),
                                      Tones({300, 2900}, 12000)};
  const EvalReport report =
      EvaluateSignals(signals, 2, "synthetic",
                      {BicubicMethod(), {"copy", BicubicMethod().reconstruct}});
  REQUIRE(report.records.size() == 4);
  CHECK(report.skipped.empty());
  const auto aggregates = report.Aggregates();
  REQUIRE(aggregates.size() == 2);
  const auto& bicubic = aggregates[0];
  CHECK(bicubic.count == 2);
  CHECK(bicubic.mean_snr_db ==
        doctest::Approx((report.records[0].snr.value +
                         report.records[2].snr.value) / 2));
  CHECK(bicubic.mean_lsd ==
        doctest::Approx((report.records[0].lsd + report.records[2].lsd) / 2));
  CHECK(bicubic.mean_snr_db > 0.0);
  for (size_t i = 0; i < 4; i += 2) {
    CHECK(report.records[i].snr.value == report.records[i + 1].snr.value);
    CHECK(report.records[i].lsd == report.records[i + 1].lsd);
  }

  const ResolutionPair pair = SimulateLowResolution(signals[0], 2);
  CHECK(report.records[0].snr.value ==
        Snr(pair.upsampled.samples, pair.reference.samples).value);
}

TEST_CASE("empty corpus and unreadable files") {
  const EvalReport empty = EvaluateSignals({}, 2, "none", {BicubicMethod()});
  const auto aggregates = empty.Aggregates();
  REQUIRE(aggregates.size() == 1);
  CHECK(aggregates[0].count == 0);
  CHECK(std::isfinite(aggregates[0].mean_snr_db));
  CHECK(std::isfinite(aggregates[0].mean_lsd));
  std::ostringstream csv;
  WriteReportCsv(csv, empty);
  CHECK(csv.str() ==
        "method,scale,dataset,item,count,snr_db,lsd\n"
        "bicubic,2,none,mean,0,,\n");

  const EvalReport missing = EvaluateCorpus(
      {"/nonexistent/a.wav"}, 2, "none", {BicubicMethod()});
  CHECK(missing.records.empty());
  REQUIRE(missing.skipped.size() == 1);
  CHECK(missing.skipped[0].item == "/nonexistent/a.wav");
}

TEST_CASE("report table layout") {
  EvalReport report;
  report.dataset = "d";
  report.scale = 2;
  report.methods = {"model"};
  report.records.push_back({"model", "d", "a.wav", 2, SnrDb::Infinite(), 0.5});
  report.records.push_back({"model", "d", "b.wav", 2, {12.0, false}, 1.5});
  std::ostringstream csv;
  WriteReportCsv(csv, report);
  CHECK(csv.str() ==
        "method,scale,dataset,item,count,snr_db,lsd\n"
        "model,2,d,a.wav,1,inf,0.5\n"
        "model,2,d,b.wav,1,12,1.5\n"
        "model,2,d,mean,2,12,1\n");
  CHECK(report.Aggregates()[0].infinite_snr == 1);
}

TEST_CASE("patched inference covers every sample") {
  ModelConfig config;
  config.patch_length = 64;
  config.depth = 2;
  config.blocks = 2;
  config.filters_log2_offset = 1;
  config.max_filters = 4;
  config.length_log2_offset = 2;
  config.min_filter_length = 3;
  config.final_filter_length = 3;
  config.transformer_layers = 1;
  config.heads = 1;
  config.ffn_hidden = 4;
  AfilmNet<float> model(config, 3);
  for (auto& p : model.Parameters()) {
    for (float& v : p.tensor.data()) v = 0.0f;
  }
  for (size_t n : {10, 64, 128, 150}) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = double(i + 1) / 256.0;
    CHECK(RunPatched(model, x) == x);
  }
}

}  // namespace
}  // namespace afsr
