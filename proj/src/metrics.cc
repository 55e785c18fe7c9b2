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

#include "afsr/metrics.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "afsr/dsp/resample.h"
#include "afsr/error.h"

namespace afsr {
namespace {

void RequireSameLength(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": reconstruction has " +
                         std::to_string(a) + " samples, reference " +
                         std::to_string(b));
  }
}

std::string FormatNumber(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void ScoreItem(const AudioSignal& highres, int r, const std::string& dataset,
               const std::string& item, const std::vector<EvalMethod>& methods,
               EvalReport& report) {
  const ResolutionPair pair = SimulateLowResolution(highres, r);
  const Spectrogram reference = StftLogPower(pair.reference.samples);
  std::vector<EvalRecord> rows;
  for (const auto& method : methods) {
    const std::vector<double> y = method.reconstruct(pair.upsampled.samples);
    EvalRecord rec;
    rec.method = method.name;
    rec.dataset = dataset;
    rec.item = item;
    rec.scale = r;
    rec.snr = Snr(y, pair.reference.samples);
    RequireSameLength(y.size(), pair.reference.size(), "lsd");
    rec.lsd = Lsd(StftLogPower(y), reference);
    rows.push_back(std::move(rec));
  }
  report.records.insert(report.records.end(), rows.begin(), rows.end());
}

}  // namespace

SnrDb Snr(std::span<const double> reconstruction,
          std::span<const double> reference) {
  RequireSameLength(reconstruction.size(), reference.size(), "snr");
  double signal = 0.0, noise = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double d = reconstruction[i] - reference[i];
    signal += reference[i] * reference[i];
    noise += d * d;
  }
  if (signal == 0.0) {
    throw NumericError("snr: reference signal is all zeros");
  }
  if (noise == 0.0) return SnrDb::Infinite();
  return {10.0 * std::log10(signal / noise), false};
}

double Lsd(const Spectrogram& reconstruction, const Spectrogram& reference) {
  if (reconstruction.frames != reference.frames ||
      reconstruction.bins != reference.bins) {
    throw DimensionError("lsd: spectrogram shapes differ");
  }
  if (reference.frames == 0) {
    throw ParameterError("lsd: no complete frame");
  }
  double total = 0.0;
  for (size_t t = 0; t < reference.frames; ++t) {
    double sq = 0.0;
    for (size_t k = 0; k < reference.bins; ++k) {
      const double d = reference.at(t, k) - reconstruction.at(t, k);
      sq += d * d;
    }
    total += std::sqrt(sq / double(reference.bins));
  }
  return total / double(reference.frames);
}

double Lsd(std::span<const double> reconstruction,
           std::span<const double> reference, size_t frame_length,
           size_t hop) {
  RequireSameLength(reconstruction.size(), reference.size(), "lsd");
  return Lsd(StftLogPower(reconstruction, frame_length, hop),
             StftLogPower(reference, frame_length, hop));
}

std::vector<EvalAggregate> EvalReport::Aggregates() const {
  std::vector<EvalAggregate> out;
  std::map<std::tuple<std::string, std::string, int>, size_t> index;
  std::vector<double> snr_sum, lsd_sum;
  auto slot = [&](const std::string& method, const std::string& data,
                  int r) {
    const auto key = std::make_tuple(method, data, r);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({method, data, r});
      snr_sum.push_back(0.0);
      lsd_sum.push_back(0.0);
    }
    return it->second;
  };
  for (const auto& method : methods) slot(method, dataset, scale);
  for (const auto& rec : records) {
    const size_t i = slot(rec.method, rec.dataset, rec.scale);
    ++out[i].count;
    lsd_sum[i] += rec.lsd;
    if (rec.snr.infinite) {
      ++out[i].infinite_snr;
    } else {
      snr_sum[i] += rec.snr.value;
    }
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const size_t finite = out[i].count - out[i].infinite_snr;
    out[i].mean_snr_db = finite > 0 ? snr_sum[i] / double(finite) : 0.0;
    out[i].mean_lsd = out[i].count > 0 ? lsd_sum[i] / double(out[i].count) : 0.0;
  }
  return out;
}

EvalMethod BicubicMethod() {
  return {"bicubic", [](std::span<const double> x) {
            return std::vector<double>(x.begin(), x.end());
          }};
}

namespace {

EvalReport EmptyReport(int r, const std::string& dataset,
                       const std::vector<EvalMethod>& methods) {
  EvalReport report;
  report.dataset = dataset;
  report.scale = r;
  for (const auto& m : methods) report.methods.push_back(m.name);
  return report;
}

}  // namespace

EvalReport EvaluateCorpus(const std::vector<std::filesystem::path>& files,
                          int r, const std::string& dataset,
                          const std::vector<EvalMethod>& methods) {
  EvalReport report = EmptyReport(r, dataset, methods);
  for (const auto& path : files) {
    const std::string item = path.filename().string();
    try {
      ScoreItem(ReadWav(path), r, dataset, item, methods, report);
    } catch (const Error& e) {
      report.skipped.push_back({path.string(), e.what()});
    }
  }
  return report;
}

EvalReport EvaluateSignals(const std::vector<AudioSignal>& signals, int r,
                           const std::string& dataset,
                           const std::vector<EvalMethod>& methods) {
  EvalReport report = EmptyReport(r, dataset, methods);
  for (size_t i = 0; i < signals.size(); ++i) {
    const std::string item = std::to_string(i);
    try {
      ScoreItem(signals[i], r, dataset, item, methods, report);
    } catch (const Error& e) {
      report.skipped.push_back({item, e.what()});
    }
  }
  return report;
}

void WriteReportCsv(std::ostream& out, const EvalReport& report) {
  out << "method,scale,dataset,item,count,snr_db,lsd\n";
  for (const auto& rec : report.records) {
    out << rec.method << ',' << rec.scale << ',' << rec.dataset << ','
        << rec.item << ",1,"
        << (rec.snr.infinite ? std::string("inf") : FormatNumber(rec.snr.value))
        << ',' << FormatNumber(rec.lsd) << '\n';
  }
  for (const auto& agg : report.Aggregates()) {
    const bool any_finite = agg.count > agg.infinite_snr;
    out << agg.method << ',' << agg.scale << ',' << agg.dataset << ",mean,"
        << agg.count << ','
        << (any_finite ? FormatNumber(agg.mean_snr_db) : std::string()) << ','
        << (agg.count > 0 ? FormatNumber(agg.mean_lsd) : std::string())
        << '\n';
  }
}

void WriteReportCsv(const std::filesystem::path& path,
                    const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  WriteReportCsv(out, report);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace afsr
