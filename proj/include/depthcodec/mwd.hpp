// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "depthcodec/image.hpp"

namespace depthcodec {

// Sinusoidal fringe geometry in working depth units.
struct FringeParams {
  double period = 8.0;    // P
  double z_offset = 0.0;  // working-range origin
  double z_range = 16.0;  // working-range span

  // z_range / P <= 2^(bits-1): the blue channel quantized at `blue_bits`
  // still pins the fringe order.
  bool resolvable(int blue_bits) const noexcept;
};

// Affine map from source depth to working depth: w = (z - offset) * scale.
struct ScaleRecord {
  double offset = 0.0;
  double scale = 1.0;

  friend bool operator==(const ScaleRecord&, const ScaleRecord&) = default;
};

struct PrescaleResult {
  DepthMap depth;        // working depth, in [0, fringe.z_range] on valid pixels
  ScaleRecord scale;
  FringeParams fringe;   // period as requested, z_offset 0
};

// Three-channel multiwavelength representation, every channel in [0, 1].
struct MwdImage {
  RealPlane r;
  RealPlane g;
  RealPlane b;
  FringeParams params;

  std::size_t width() const noexcept { return r.width(); }
  std::size_t height() const noexcept { return r.height(); }
};

struct PhaseMap {
  RealPlane wrapped;            // atan2 phase in (-pi, pi]
  Plane<std::int32_t> order;    // fringe order k >= 0
  RealPlane unwrapped;          // phi0 + 2*pi*k with phi0 the [0, 2*pi) representative
};

// Shifts depth so the smallest valid value maps to 0 and shrinks the span when
// it exceeds P * 2^(blue_bits-1). Constant maps keep scale 1 and get
// z_range = P. Invalid pixels are written as 0.
PrescaleResult prescale_depth(const DepthMap& depth, double period, int blue_bits);

// Throws RangeViolation unless params.resolvable(blue_bits).
MwdImage mwd_encode(const DepthMap& depth, const FringeParams& params, int blue_bits);

PhaseMap wrapped_phase(const MwdImage& image);

// Fills order and unwrapped from the blue channel.
void fringe_order(const MwdImage& image, PhaseMap& phase);

// Full inverse: phase recovery, unwrapping, and the inverse affine map. The
// returned mask marks every pixel valid; the caller owns validity.
DepthMap mwd_decode(const MwdImage& image, const ScaleRecord& scale);

// Working depth (z_offset + unwrapped fringe position) for one pixel, before
// the inverse affine map.
double decode_pixel(double r, double g, double b, const FringeParams& params) noexcept;

namespace serial {

MwdImage mwd_encode(const DepthMap& depth, const FringeParams& params, int blue_bits);
DepthMap mwd_decode(const MwdImage& image, const ScaleRecord& scale);

}  // namespace serial

}  // namespace depthcodec
