// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "depthcodec/error.hpp"
#include "depthcodec/nn/layers.hpp"

namespace depthcodec::nn {

double gelu(double x) { return 0.5 * x * std::erfc(-x / std::numbers::sqrt2); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  return cdf + x * pdf;
}

Tensor Gelu::forward(const Tensor& x) const {
  Tensor y(x.c, x.h, x.w);
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y.v[i] = gelu(x.v[i]);
  return y;
}

Tensor Gelu::backward(const Tensor& x, const Tensor& gy) const {
  Tensor gx(x.c, x.h, x.w);
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) gx.v[i] = gy.v[i] * gelu_derivative(x.v[i]);
  return gx;
}

TcmBlock::TcmBlock(int channels, int window) : c_(channels) {
  if (channels <= 0 || channels % 2 != 0) {
    throw Error(ErrorCode::OddChannels, "block channel count must be even");
  }
  const int half = channels / 2;
  conv_a = Conv2d(half, half, 3, 1, 1);
  conv_b = Conv2d(half, half, 3, 1, 1);
  attention = WindowAttention(half, window);
  fuse = Conv2d(channels, channels, 1, 1, 0);
}

void TcmBlock::init(std::mt19937_64& rng, double gain) {
  conv_a.init(rng, gain);
  conv_b.init(rng, 0.5 * gain);
  attention.init(rng, 0.5 * gain);
  fuse.init(rng, gain);
}

void TcmBlock::init_identity() {
  for (Param* p : {&conv_b.weight, &conv_b.bias, &attention.wo, &attention.bo, &fuse.weight, &fuse.bias}) {
    std::fill(p->value.begin(), p->value.end(), 0.0);
  }
  for (int i = 0; i < c_; ++i) fuse.weight.value[static_cast<std::size_t>(i) * c_ + i] = 1.0;
}

void TcmBlock::collect(std::vector<Param*>& out) {
  conv_a.collect(out);
  conv_b.collect(out);
  attention.collect(out);
  fuse.collect(out);
}

Tensor TcmBlock::forward(const Tensor& x) const {
  if (x.c % 2 != 0) throw Error(ErrorCode::OddChannels, "block input has odd channel count");
  if (x.c != c_) throw Error(ErrorCode::InvalidArgument, "channel count mismatch");
  const Tensor x1 = slice_channels(x, 0, c_ / 2);
  const Tensor x2 = slice_channels(x, c_ / 2, c_);
  Tensor conv_out = conv_b.forward(Gelu{}.forward(conv_a.forward(x1)));
  for (std::size_t i = 0; i < conv_out.size(); ++i) conv_out.v[i] += x1.v[i];
  return fuse.forward(concat_channels(conv_out, attention.forward(x2)));
}

Tensor TcmBlock::backward(const Tensor& x, const Tensor& gy) {
  const Tensor x1 = slice_channels(x, 0, c_ / 2);
  const Tensor x2 = slice_channels(x, c_ / 2, c_);
  const Tensor a = conv_a.forward(x1);
  const Tensor h = Gelu{}.forward(a);
  Tensor conv_out = conv_b.forward(h);
  for (std::size_t i = 0; i < conv_out.size(); ++i) conv_out.v[i] += x1.v[i];
  const Tensor cat = concat_channels(conv_out, attention.forward(x2));

  const Tensor g_cat = fuse.backward(cat, gy);
  const Tensor g_conv = slice_channels(g_cat, 0, c_ / 2);
  const Tensor g_x2 = attention.backward(x2, slice_channels(g_cat, c_ / 2, c_));
  const Tensor g_a = Gelu{}.backward(a, conv_b.backward(h, g_conv));
  Tensor g_x1 = conv_a.backward(x1, g_a);
  for (std::size_t i = 0; i < g_x1.size(); ++i) g_x1.v[i] += g_conv.v[i];
  return concat_channels(g_x1, g_x2);
}

Tensor Sequential::forward(const Tensor& x) const {
  Tensor t = x;
  for (const Layer& layer : layers_) {
    t = std::visit([&](const auto& l) { return l.forward(t); }, layer);
  }
  return t;
}

Tensor Sequential::forward_train(const Tensor& x, std::vector<Tensor>& inputs) const {
  inputs.clear();
  Tensor t = x;
  for (const Layer& layer : layers_) {
    inputs.push_back(t);
    t = std::visit([&](const auto& l) { return l.forward(t); }, layer);
  }
  return t;
}

Tensor Sequential::backward(const std::vector<Tensor>& inputs, Tensor gy) {
  for (std::size_t i = layers_.size(); i-- > 0;) {
    gy = std::visit([&](auto& l) { return l.backward(inputs[i], gy); }, layers_[i]);
  }
  return gy;
}

void Sequential::collect(std::vector<Param*>& out) {
  for (Layer& layer : layers_) {
    std::visit(
        [&](auto& l) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(l)>, Gelu>) l.collect(out);
        },
        layer);
  }
}

}  // namespace depthcodec::nn
