// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/image.hpp"

#include <algorithm>
#include <limits>

#include "depthcodec/error.hpp"

namespace depthcodec {

std::size_t DepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(valid.pixels().begin(), valid.pixels().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

DepthMap DepthMap::from_values(RealPlane values) {
  MaskPlane valid(values.width(), values.height(), 1);
  return from_values(std::move(values), std::move(valid));
}

DepthMap DepthMap::from_values(RealPlane values, MaskPlane valid) {
  if (!values.same_shape(valid)) {
    throw Error(ErrorCode::InvalidArgument, "depth values and validity mask differ in shape");
  }
  DepthMap d;
  d.values = std::move(values);
  d.valid = std::move(valid);
  d.refresh_range();
  return d;
}

void DepthMap::refresh_range() noexcept {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!valid[i]) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  if (lo > hi) {
    z_min = z_max = 0.0;
  } else {
    z_min = lo;
    z_max = hi;
  }
}

}  // namespace depthcodec
