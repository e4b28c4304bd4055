// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/mwd.hpp"

#include <cmath>
#include <string>

#include "depthcodec/error.hpp"
#include "mwd_pixel.hpp"

namespace depthcodec {

namespace {

void check_encodable(const DepthMap& depth, const FringeParams& params, int blue_bits) {
  if (!(params.period > 0.0) || !(params.z_range > 0.0)) {
    throw Error(ErrorCode::RangeViolation, "fringe period and range must be positive");
  }
  if (!params.resolvable(blue_bits)) {
    throw Error(ErrorCode::RangeViolation,
                "z_range/P = " + std::to_string(params.z_range / params.period) +
                    " exceeds 2^(bits-1) for blue bits " + std::to_string(blue_bits));
  }
  if (!depth.values.same_shape(depth.valid)) {
    throw Error(ErrorCode::InvalidArgument, "depth values and validity mask differ in shape");
  }
}

MwdImage make_image(const DepthMap& depth, const FringeParams& params) {
  MwdImage out;
  out.r = RealPlane(depth.width(), depth.height());
  out.g = RealPlane(depth.width(), depth.height());
  out.b = RealPlane(depth.width(), depth.height());
  out.params = params;
  return out;
}

}  // namespace

bool FringeParams::resolvable(int blue_bits) const noexcept {
  return z_range / period <= std::ldexp(1.0, blue_bits - 1);
}

PrescaleResult prescale_depth(const DepthMap& depth, double period, int blue_bits) {
  if (depth.valid_count() == 0) {
    throw Error(ErrorCode::AllInvalid, "depth map has no valid pixels");
  }
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "fringe period must be positive");

  DepthMap source = depth;
  source.refresh_range();
  const double span = source.z_max - source.z_min;
  const double bound = period * std::ldexp(1.0, blue_bits - 1);

  PrescaleResult out;
  out.scale.offset = source.z_min;
  out.scale.scale = span > bound ? bound / span : 1.0;
  out.fringe.period = period;
  out.fringe.z_offset = 0.0;
  if (span == 0.0) {
    out.fringe.z_range = period;
  } else if (span > bound) {
    out.fringe.z_range = bound;
  } else {
    out.fringe.z_range = span;
  }

  RealPlane working(depth.width(), depth.height(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(working.size());
  const double offset = out.scale.offset;
  const double scale = out.scale.scale;
  const double top = out.fringe.z_range;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (depth.valid[i]) working[i] = std::min((depth.values[i] - offset) * scale, top);
  }
  out.depth = DepthMap::from_values(std::move(working), depth.valid);
  return out;
}

MwdImage mwd_encode(const DepthMap& depth, const FringeParams& params, int blue_bits) {
  check_encodable(depth, params, blue_bits);
  MwdImage out = make_image(depth, params);
  const detail::RgbPixel invalid = detail::encode_pixel(params.z_offset, params);
  const auto n = static_cast<std::ptrdiff_t>(depth.values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const detail::RgbPixel px =
        depth.valid[i] ? detail::encode_pixel(depth.values[i], params) : invalid;
    out.r[i] = px.r;
    out.g[i] = px.g;
    out.b[i] = px.b;
  }
  return out;
}

PhaseMap wrapped_phase(const MwdImage& image) {
  PhaseMap phase;
  phase.wrapped = RealPlane(image.width(), image.height());
  const auto n = static_cast<std::ptrdiff_t>(image.r.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    phase.wrapped[i] = detail::wrapped_phase_pixel(image.r[i], image.g[i]);
  }
  return phase;
}

void fringe_order(const MwdImage& image, PhaseMap& phase) {
  if (!phase.wrapped.same_shape(image.r)) {
    throw Error(ErrorCode::InvalidArgument, "phase map does not match image dimensions");
  }
  phase.order = Plane<std::int32_t>(image.width(), image.height());
  phase.unwrapped = RealPlane(image.width(), image.height());
  const auto n = static_cast<std::ptrdiff_t>(image.r.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double phi = phase.wrapped[i];
    const std::int32_t k = detail::fringe_order_pixel(image.b[i], phi, image.params);
    phase.order[i] = k;
    phase.unwrapped[i] = detail::kTwoPi * detail::phase_to_unit(phi) + detail::kTwoPi * k;
  }
}

double decode_pixel(double r, double g, double b, const FringeParams& params) noexcept {
  return params.z_offset + detail::unwrap_pixel(r, g, b, params);
}

DepthMap mwd_decode(const MwdImage& image, const ScaleRecord& scale) {
  RealPlane depth(image.width(), image.height());
  const auto n = static_cast<std::ptrdiff_t>(depth.size());
  const FringeParams params = image.params;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    depth[i] = decode_pixel(image.r[i], image.g[i], image.b[i], params) / scale.scale + scale.offset;
  }
  return DepthMap::from_values(std::move(depth));
}

namespace serial {

MwdImage mwd_encode(const DepthMap& depth, const FringeParams& params, int blue_bits) {
  check_encodable(depth, params, blue_bits);
  MwdImage out = make_image(depth, params);
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    const double w = depth.valid[i] ? depth.values[i] : params.z_offset;
    const detail::RgbPixel px = detail::encode_pixel(w, params);
    out.r[i] = px.r;
    out.g[i] = px.g;
    out.b[i] = px.b;
  }
  return out;
}

DepthMap mwd_decode(const MwdImage& image, const ScaleRecord& scale) {
  RealPlane depth(image.width(), image.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    depth[i] = decode_pixel(image.r[i], image.g[i], image.b[i], image.params) / scale.scale +
               scale.offset;
  }
  return DepthMap::from_values(std::move(depth));
}

}  // namespace serial

}  // namespace depthcodec
