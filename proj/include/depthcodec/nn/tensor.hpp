// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace depthcodec::nn {

// Single-sample CHW tensor in double precision.
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0)
      : c(channels), h(height), w(width),
        v(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t size() const noexcept { return v.size(); }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
  double& at(int ch, int y, int x) { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double* channel(int ch) { return v.data() + static_cast<std::size_t>(ch) * plane(); }
  const double* channel(int ch) const { return v.data() + static_cast<std::size_t>(ch) * plane(); }
  bool same_shape(const Tensor& o) const noexcept { return c == o.c && h == o.h && w == o.w; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Trainable array with its gradient accumulator.
struct Param {
  std::string name;
  std::vector<double> value;
  std::vector<double> grad;

  void resize(std::size_t n) {
    value.assign(n, 0.0);
    grad.assign(n, 0.0);
  }
  std::size_t size() const noexcept { return value.size(); }
};

// Channel slicing and concatenation along C.
Tensor slice_channels(const Tensor& t, int begin, int end);
Tensor concat_channels(const Tensor& a, const Tensor& b);

// Replicates edge pixels so height and width become multiples of `multiple`.
Tensor pad_to_multiple(const Tensor& t, int multiple);
Tensor crop(const Tensor& t, int height, int width);
// Adjoint of crop: embeds `g` into a zero tensor of the given size.
Tensor uncrop(const Tensor& g, int height, int width);
// Adjoint of pad_to_multiple: folds gradients of replicated pixels back.
Tensor unpad_gradient(const Tensor& g, int height, int width);

}  // namespace depthcodec::nn
