// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>
#include <variant>
#include <vector>

#include "depthcodec/nn/tensor.hpp"

namespace depthcodec::nn {

// Forward passes are const and allocation-local, so one model may serve
// concurrent inference calls. Backward passes take the layer input, add into
// Param::grad and return the input gradient.

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int padding);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy);
  void init(std::mt19937_64& rng, double gain);
  void collect(std::vector<Param*>& out);

  int in_channels() const noexcept { return in_; }
  int out_channels() const noexcept { return out_; }
  int kernel() const noexcept { return k_; }
  int stride() const noexcept { return stride_; }
  int padding() const noexcept { return pad_; }
  int out_size(int n) const noexcept { return (n + 2 * pad_ - k_) / stride_ + 1; }

  Param weight;  // [out][in][k][k]
  Param bias;    // [out]

 private:
  int in_ = 0, out_ = 0, k_ = 1, stride_ = 1, pad_ = 0;
};

class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(int in_channels, int out_channels, int kernel, int stride, int padding);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy);
  void init(std::mt19937_64& rng, double gain);
  void collect(std::vector<Param*>& out);

  int in_channels() const noexcept { return in_; }
  int out_channels() const noexcept { return out_; }
  int kernel() const noexcept { return k_; }
  int stride() const noexcept { return stride_; }
  int padding() const noexcept { return pad_; }
  int out_size(int n) const noexcept { return (n - 1) * stride_ - 2 * pad_ + k_; }

  Param weight;  // [in][out][k][k]
  Param bias;    // [out]

 private:
  int in_ = 0, out_ = 0, k_ = 1, stride_ = 1, pad_ = 0;
};

// Exact GELU, x·Φ(x).
struct Gelu {
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy) const;
};
double gelu(double x);
double gelu_derivative(double x);

// Single-head self-attention inside non-overlapping window×window tiles with
// a residual connection: out = x + Wo·softmax(QKᵀ/√d)·V + bo. Edge tiles are
// ragged when H or W is not a multiple of the window.
class WindowAttention {
 public:
  WindowAttention() = default;
  WindowAttention(int channels, int window);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy);
  void init(std::mt19937_64& rng, double gain);
  void collect(std::vector<Param*>& out);

  // Row-stochastic attention matrix of the tile whose top-left is (x0, y0).
  std::vector<double> attention_weights(const Tensor& x, int x0, int y0) const;

  int channels() const noexcept { return c_; }
  int window() const noexcept { return window_; }

  Param wq, wk, wv, wo;  // [c][c]
  Param bq, bk, bv, bo;  // [c]

 private:
  struct Tile;
  Tile gather(const Tensor& x, int x0, int y0) const;
  int c_ = 0;
  int window_ = 4;
};

// Channel-split block: first half through conv→GELU→conv with a residual,
// second half through windowed attention, concatenated and mixed by 1×1 conv.
class TcmBlock {
 public:
  TcmBlock() = default;
  TcmBlock(int channels, int window);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& gy);
  void init(std::mt19937_64& rng, double gain);
  // Fuse set to identity and both branches silenced, so forward(x) == x.
  void init_identity();
  void collect(std::vector<Param*>& out);

  Conv2d conv_a, conv_b, fuse;
  WindowAttention attention;

 private:
  int c_ = 0;
};

using Layer = std::variant<Conv2d, ConvTranspose2d, Gelu, TcmBlock>;

class Sequential {
 public:
  void add(Layer layer) { layers_.push_back(std::move(layer)); }
  Tensor forward(const Tensor& x) const;
  // Keeps every layer input in `inputs` for the backward pass.
  Tensor forward_train(const Tensor& x, std::vector<Tensor>& inputs) const;
  Tensor backward(const std::vector<Tensor>& inputs, Tensor gy);
  void collect(std::vector<Param*>& out);
  std::vector<Layer>& layers() noexcept { return layers_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

 private:
  std::vector<Layer> layers_;
};

// Reference kernels: textbook loops, no threading. Same accumulation order as
// the production kernels, so results agree bitwise.
namespace serial {
Tensor conv2d_forward(const Conv2d& layer, const Tensor& x);
Tensor conv_transpose2d_forward(const ConvTranspose2d& layer, const Tensor& x);
}  // namespace serial

}  // namespace depthcodec::nn
