// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "depthcodec/image.hpp"

namespace depthcodec {

inline constexpr double kDefaultOriginalBpp = 16.0;

// Distortion is measured on valid pixels only, against the ground-truth
// range. PSNR is −20·log10(NRMSE), i.e. PSNR of depth normalized to [0, 1].
struct MetricsReport {
  double rmse = 0.0;           // depth units
  double nrmse = 0.0;          // RMSE / (z_max − z_min); NaN when the range is zero
  double accuracy_pct = 0.0;   // (1 − nrmse)·100; NaN when nrmse is undefined
  double psnr_db = 0.0;        // +inf for exact reconstructions
  double bpp = 0.0;            // coded_bits / (width·height)
  double cr = 0.0;             // original_bits / coded_bits
  std::uint64_t coded_bits = 0;
  std::uint64_t pixel_count = 0;
  std::uint64_t valid_pixel_count = 0;
  bool zero_range = false;     // NRMSE, accuracy and PSNR are not-a-value

  bool accuracy_defined() const noexcept { return !zero_range; }
};

// Throws EmptyMask when no pixel is valid, InvalidArgument on shape mismatch.
// A zero ground-truth range is reported through `zero_range`, not thrown.
// `original_bits` ≤ 0 selects 16 bits per pixel.
MetricsReport compute_metrics(const RealPlane& truth, const RealPlane& recon, const MaskPlane& mask,
                              std::uint64_t coded_bits, double original_bits = 0.0);

// Fixed-precision text used by the CSV writer; "inf" / "nan" for non-finite values.
std::string format_metric(double v);

}  // namespace depthcodec
