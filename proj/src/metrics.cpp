// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "depthcodec/error.hpp"

namespace depthcodec {

MetricsReport compute_metrics(const RealPlane& truth, const RealPlane& recon, const MaskPlane& mask,
                              std::uint64_t coded_bits, double original_bits) {
  if (!truth.same_shape(recon) || !truth.same_shape(mask)) {
    throw Error(ErrorCode::InvalidArgument, "metric operand shapes differ");
  }
  MetricsReport r;
  r.pixel_count = truth.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sq = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (mask[i] == 0) continue;
    ++r.valid_pixel_count;
    lo = std::min(lo, truth[i]);
    hi = std::max(hi, truth[i]);
    const double e = recon[i] - truth[i];
    sq += e * e;
  }
  if (r.valid_pixel_count == 0) throw Error(ErrorCode::EmptyMask, "no valid pixels to evaluate");

  r.rmse = std::sqrt(sq / static_cast<double>(r.valid_pixel_count));
  const double range = hi - lo;
  if (range > 0.0) {
    r.nrmse = r.rmse / range;
    r.accuracy_pct = (1.0 - r.nrmse) * 100.0;
    r.psnr_db = r.nrmse > 0.0 ? -20.0 * std::log10(r.nrmse) : std::numeric_limits<double>::infinity();
  } else {
    r.zero_range = true;
    r.nrmse = r.accuracy_pct = r.psnr_db = std::numeric_limits<double>::quiet_NaN();
  }

  r.coded_bits = coded_bits;
  r.bpp = static_cast<double>(coded_bits) / static_cast<double>(r.pixel_count);
  const double original = original_bits > 0.0 ? original_bits : kDefaultOriginalBpp * static_cast<double>(r.pixel_count);
  r.cr = coded_bits > 0 ? original / static_cast<double>(coded_bits) : std::numeric_limits<double>::infinity();
  return r;
}

std::string format_metric(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace depthcodec
