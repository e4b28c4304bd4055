// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "depthcodec/container.hpp"
#include "depthcodec/metrics.hpp"

namespace depthcodec {

struct CorpusItem {
  std::string name;
  DepthMap depth;
  double original_bits = 0.0;  // ≤ 0: 16 bits per pixel
};

struct SweepSetting {
  std::string label;  // printed in the `setting` column
  EncodeConfig config;
};

struct RdPoint {
  std::string setting;
  MetricsReport mean;  // per-field means over the corpus, summed in image order
  double enc_ms = 0.0;
  double dec_ms = 0.0;
};

struct SweepOptions {
  int jobs = 1;
  bool record_timing = true;  // false writes 0 timings, for byte-stable CSVs
};

// Encodes and decodes every image under every setting. Per-image errors are
// rethrown with the image name attached. Points are returned sorted by bpp.
std::vector<RdPoint> rd_sweep(const std::vector<CorpusItem>& corpus,
                              const std::vector<SweepSetting>& settings, const SweepOptions& options = {});

inline constexpr const char* kSweepCsvHeader = "setting,bpp,psnr_db,rmse,nrmse,accuracy_pct,cr,enc_ms,dec_ms";
std::string sweep_csv(const std::vector<RdPoint>& points);

// Single image: encode, decode, measure against the input.
struct RoundTrip {
  EncodeResult encoded;
  DecodeResult decoded;
  MetricsReport metrics;
};
RoundTrip evaluate_round_trip(const DepthMap& depth, const EncodeConfig& config,
                              const CodecModel* model = nullptr, double original_bits = 0.0);

}  // namespace depthcodec
