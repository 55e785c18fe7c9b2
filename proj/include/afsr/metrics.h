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

#ifndef AFSR_METRICS_H_
#define AFSR_METRICS_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "afsr/dsp/audio.h"
#include "afsr/dsp/stft.h"

namespace afsr {

// Signal-to-noise ratio in dB. A reconstruction with zero error energy has
// no finite value and is flagged `infinite` instead.
struct SnrDb {
  double value = 0.0;
  bool infinite = false;

  static SnrDb Infinite() { return {0.0, true}; }
};

// 10 log10(|y|^2 / |x - y|^2) for reconstruction x and reference y.
// Throws DimensionError on a length mismatch and NumericError when the
// reference is all zeros.
SnrDb Snr(std::span<const double> reconstruction,
          std::span<const double> reference);

// Log-spectral distance: the per-frame root-mean-square difference of log
// power spectra over frequency bins, averaged over frames.
double Lsd(const Spectrogram& reconstruction, const Spectrogram& reference);
double Lsd(std::span<const double> reconstruction,
           std::span<const double> reference,
           size_t frame_length = kLsdFrameLength, size_t hop = kLsdHopLength);

struct EvalRecord {
  std::string method;
  std::string dataset;
  std::string item;
  int scale = 0;
  SnrDb snr;
  double lsd = 0.0;
};

struct EvalAggregate {
  std::string method;
  std::string dataset;
  int scale = 0;
  size_t count = 0;           // items that entered the report
  size_t infinite_snr = 0;    // excluded from mean_snr_db
  double mean_snr_db = 0.0;   // over items with a finite SNR
  double mean_lsd = 0.0;
};

struct SkippedItem {
  std::string item;
  std::string reason;
};

struct EvalReport {
  std::string dataset;
  int scale = 0;
  std::vector<std::string> methods;  // each gets an aggregate, even if empty
  std::vector<EvalRecord> records;
  std::vector<SkippedItem> skipped;

  // One aggregate per (method, dataset, scale): first the declared methods,
  // then any other combination in order of first appearance.
  std::vector<EvalAggregate> Aggregates() const;
};

// Maps a cubic-upsampled low-resolution signal to a reconstruction of the
// same length.
using Reconstructor =
    std::function<std::vector<double>(std::span<const double>)>;

struct EvalMethod {
  std::string name;
  Reconstructor reconstruct;
};

// The baseline: the cubic-upsampled signal itself.
EvalMethod BicubicMethod();

// For each file in order: read, downsample by r, cubic-upsample, run every
// method and score SNR and LSD against the original. Files that cannot be
// read or scored are listed in `skipped` with the reason.
EvalReport EvaluateCorpus(const std::vector<std::filesystem::path>& files,
                          int r, const std::string& dataset,
                          const std::vector<EvalMethod>& methods);

// Same, for signals already in memory; items are named by index.
EvalReport EvaluateSignals(const std::vector<AudioSignal>& signals, int r,
                           const std::string& dataset,
                           const std::vector<EvalMethod>& methods);

// Comma-separated table with header
//   method,scale,dataset,item,count,snr_db,lsd
// Per-item rows come first, then one "mean" row per aggregate. An infinite
// SNR is written as "inf"; an empty aggregate leaves the means blank.
void WriteReportCsv(std::ostream& out, const EvalReport& report);
void WriteReportCsv(const std::filesystem::path& path,
                    const EvalReport& report);

}  // namespace afsr

#endif  // AFSR_METRICS_H_
