// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

// Per-pixel MWD math shared by the parallel kernels and the serial reference.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthcodec/mwd.hpp"

namespace depthcodec::detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RgbPixel {
  double r, g, b;
};

inline RgbPixel encode_pixel(double working_depth, const FringeParams& p) noexcept {
  const double shifted = working_depth - p.z_offset;
  const double angle = kTwoPi * shifted / p.period;
  const double blue = std::clamp(shifted / p.z_range, 0.0, 1.0);
  return {0.5 * (1.0 + std::sin(angle)), 0.5 * (1.0 + std::cos(angle)), blue};
}

inline double wrapped_phase_pixel(double r, double g) noexcept {
  const double s = 2.0 * r - 1.0;
  const double c = 2.0 * g - 1.0;
  if (s == 0.0 && c == 0.0) return 0.0;
  const double phi = std::atan2(s, c);
  return phi == -std::numbers::pi ? std::numbers::pi : phi;
}

inline double phase_to_unit(double phi) noexcept {
  return (phi >= 0.0 ? phi : phi + kTwoPi) / kTwoPi;
}

inline std::int32_t fringe_order_pixel(double blue, double phi, const FringeParams& p) noexcept {
  const double coarse = blue * p.z_range;
  const double k = std::round(coarse / p.period - phase_to_unit(phi));
  const double k_max = std::ceil(p.z_range / p.period);
  return static_cast<std::int32_t>(std::clamp(k, 0.0, k_max));
}

inline double unwrap_pixel(double r, double g, double b, const FringeParams& p) noexcept {
  const double phi = wrapped_phase_pixel(r, g);
  const std::int32_t k = fringe_order_pixel(b, phi, p);
  return p.period * (static_cast<double>(k) + phase_to_unit(phi));
}

}  // namespace depthcodec::detail
