// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace depthcodec {

// Row-major single-channel raster.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  bool same_shape(std::size_t w, std::size_t h) const noexcept {
    return width_ == w && height_ == h;
  }
  template <typename U>
  bool same_shape(const Plane<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Plane& a, const Plane& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using RealPlane = Plane<double>;
using SymbolPlane = Plane<std::uint16_t>;
// uint8_t rather than bool so the mask exposes contiguous storage.
using MaskPlane = Plane<std::uint8_t>;

// Depth raster with per-pixel validity and the ground-truth range over valid
// pixels.
struct DepthMap {
  RealPlane values;
  MaskPlane valid;
  double z_min = 0.0;
  double z_max = 0.0;

  std::size_t width() const noexcept { return values.width(); }
  std::size_t height() const noexcept { return values.height(); }
  std::size_t valid_count() const noexcept;

  // Builds a map with every pixel valid and z_min/z_max taken from the data.
  static DepthMap from_values(RealPlane values);
  // Builds a map from explicit values and mask; recomputes z_min/z_max.
  static DepthMap from_values(RealPlane values, MaskPlane valid);

  // Recomputes z_min/z_max from the valid pixels. Leaves both at 0 when no
  // pixel is valid.
  void refresh_range() noexcept;
};

}  // namespace depthcodec
