// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/nn/tensor.hpp"

#include <algorithm>
#include <cstring>

#include "depthcodec/error.hpp"

namespace depthcodec::nn {

Tensor slice_channels(const Tensor& t, int begin, int end) {
  Tensor out(end - begin, t.h, t.w);
  std::copy(t.channel(begin), t.channel(begin) + out.size(), out.v.begin());
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.h != b.h || a.w != b.w) throw Error(ErrorCode::InvalidArgument, "concat shape mismatch");
  Tensor out(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), out.v.begin());
  std::copy(b.v.begin(), b.v.end(), out.v.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

Tensor pad_to_multiple(const Tensor& t, int multiple) {
  const int h = (t.h + multiple - 1) / multiple * multiple;
  const int w = (t.w + multiple - 1) / multiple * multiple;
  Tensor out(t.c, h, w);
  for (int c = 0; c < t.c; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.at(c, y, x) = t.at(c, std::min(y, t.h - 1), std::min(x, t.w - 1));
    }
  }
  return out;
}

Tensor crop(const Tensor& t, int height, int width) {
  Tensor out(t.c, height, width);
  for (int c = 0; c < t.c; ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) out.at(c, y, x) = t.at(c, y, x);
    }
  }
  return out;
}

Tensor uncrop(const Tensor& g, int height, int width) {
  Tensor out(g.c, height, width);
  for (int c = 0; c < g.c; ++c) {
    for (int y = 0; y < g.h; ++y) {
      for (int x = 0; x < g.w; ++x) out.at(c, y, x) = g.at(c, y, x);
    }
  }
  return out;
}

Tensor unpad_gradient(const Tensor& g, int height, int width) {
  Tensor out(g.c, height, width);
  for (int c = 0; c < g.c; ++c) {
    for (int y = 0; y < g.h; ++y) {
      for (int x = 0; x < g.w; ++x) {
        out.at(c, std::min(y, height - 1), std::min(x, width - 1)) += g.at(c, y, x);
      }
    }
  }
  return out;
}

}  // namespace depthcodec::nn
