// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "depthcodec/error.hpp"
#include "depthcodec/nn/layers.hpp"
#include "grad_oracle.hpp"

using namespace depthcodec;
using namespace depthcodec::nn;

namespace {

constexpr double kStep = 1e-5;
constexpr double kTol = 1e-6;
// Central differences carry up to ~1e-9 roundoff at this step; gradients below the
// floor are compared in absolute terms.
constexpr double kFloor = 1e-3;

// Checks input and parameter gradients of `layer` against finite differences
// of the probe Σ c·forward(x).
template <typename L>
void expect_gradients_match(L& layer, Tensor x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Tensor out = layer.forward(x);
  const Tensor coeff = oracle::random_tensor(out.c, out.h, out.w, rng);
  std::vector<Param*> params;
  if constexpr (!std::is_same_v<L, Gelu>) {
    layer.collect(params);
    for (Param* p : params) std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }
  const Tensor gx = layer.backward(x, coeff);
  auto f = [&] { return oracle::probe(layer.forward(x), coeff); };

  for (std::size_t i = 0; i < x.size(); i += std::max<std::size_t>(1, x.size() / 40)) {
    const double num = oracle::central_difference(f, x.v[i], kStep);
    EXPECT_LT(oracle::relative_error(gx.v[i], num, kFloor), kTol) << "input " << i;
  }
  for (Param* p : params) {
    for (std::size_t i = 0; i < p->size(); i += std::max<std::size_t>(1, p->size() / 25)) {
      const double num = oracle::central_difference(f, p->value[i], kStep);
      EXPECT_LT(oracle::relative_error(p->grad[i], num, kFloor), kTol) << p->name << "[" << i << "]";
    }
  }
}

}  // namespace

TEST(Conv2d, OutputShapeFollowsStrideArithmetic) {
  Conv2d conv(3, 8, 3, 2, 1);
  EXPECT_EQ(conv.forward(Tensor(3, 64, 64)).h, 32);
  EXPECT_EQ(conv.forward(Tensor(3, 7, 5)).w, 3);
}

TEST(Conv2d, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(1);
  for (auto [k, s, p] : {std::tuple{3, 1, 1}, {3, 2, 1}, {1, 1, 0}}) {
    Conv2d conv(3, 4, k, s, p);
    conv.init(rng, 1.0);
    oracle::fill_uniform(conv.bias.value, rng, -0.5, 0.5);
    expect_gradients_match(conv, oracle::random_tensor(3, 7, 6, rng), 11);
  }
}

TEST(ConvTranspose2d, DoublesSpatialSize) {
  ConvTranspose2d up(4, 2, 4, 2, 1);
  const Tensor y = up.forward(Tensor(4, 3, 5));
  EXPECT_EQ(y.h, 6);
  EXPECT_EQ(y.w, 10);
}

TEST(ConvTranspose2d, IsAdjointOfStridedConv) {
  // <conv(x), y> == <x, convT(y)> when both share weights and have no bias.
  std::mt19937_64 rng(2);
  Conv2d conv(3, 5, 4, 2, 1);
  conv.init(rng, 1.0);
  ConvTranspose2d convt(5, 3, 4, 2, 1);
  // conv weight [out=5][in=3] equals convT weight [in=5][out=3].
  convt.weight.value = conv.weight.value;
  const Tensor x = oracle::random_tensor(3, 8, 8, rng);
  const Tensor y = oracle::random_tensor(5, 4, 4, rng);
  EXPECT_NEAR(oracle::probe(conv.forward(x), y), oracle::probe(convt.forward(y), x), 1e-12);
}

TEST(ConvTranspose2d, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  ConvTranspose2d up(4, 3, 4, 2, 1);
  up.init(rng, 1.0);
  oracle::fill_uniform(up.bias.value, rng, -0.5, 0.5);
  expect_gradients_match(up, oracle::random_tensor(4, 3, 5, rng), 12);
}

TEST(Gelu, KnownValuesAndGradient) {
  EXPECT_DOUBLE_EQ(gelu(0.0), 0.0);
  EXPECT_NEAR(gelu(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(gelu(-1.0), -0.15865525393145707, 1e-15);
  Gelu g;
  std::mt19937_64 rng(4);
  expect_gradients_match(g, oracle::random_tensor(2, 4, 4, rng, -3.0, 3.0), 13);
}

TEST(WindowAttention, RowsSumToOne) {
  std::mt19937_64 rng(5);
  WindowAttention attn(8, 4);
  attn.init(rng, 2.0);
  const Tensor x = oracle::random_tensor(8, 6, 7, rng);
  for (auto [x0, y0] : {std::pair{0, 0}, {4, 0}, {0, 4}, {4, 4}}) {
    const auto a = attn.attention_weights(x, x0, y0);
    const std::size_t n = static_cast<std::size_t>(std::sqrt(static_cast<double>(a.size())) + 0.5);
    ASSERT_EQ(n * n, a.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double row = std::accumulate(a.begin() + i * n, a.begin() + (i + 1) * n, 0.0);
      EXPECT_NEAR(row, 1.0, 1e-6);
    }
  }
}

TEST(WindowAttention, TilesAreIndependent) {
  std::mt19937_64 rng(6);
  WindowAttention attn(4, 4);
  attn.init(rng, 1.0);
  Tensor x = oracle::random_tensor(4, 8, 8, rng);
  const Tensor before = attn.forward(x);
  x.at(0, 7, 7) += 1.0;  // bottom-right tile only
  const Tensor after = attn.forward(x);
  for (int c = 0; c < 4; ++c) {
    for (int y = 0; y < 4; ++y) {
      for (int xx = 0; xx < 8; ++xx) EXPECT_EQ(before.at(c, y, xx), after.at(c, y, xx));
    }
  }
}

TEST(WindowAttention, GradientsMatchFiniteDifferencesOnRaggedTiles) {
  std::mt19937_64 rng(7);
  WindowAttention attn(6, 4);
  attn.init(rng, 1.5);
  for (Param* p : {&attn.bq, &attn.bk, &attn.bv, &attn.bo}) oracle::fill_uniform(p->value, rng, -0.3, 0.3);
  expect_gradients_match(attn, oracle::random_tensor(6, 5, 6, rng), 14);
}

TEST(TcmBlock, RejectsOddChannels) {
  try {
    TcmBlock block(7, 4);
    FAIL() << "expected OddChannels";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddChannels);
  }
}

TEST(TcmBlock, IdentityInitializationPassesInputThrough) {
  std::mt19937_64 rng(8);
  TcmBlock block(16, 4);
  block.init(rng, 1.0);
  block.init_identity();
  const Tensor x = oracle::random_tensor(16, 8, 8, rng);
  const Tensor y = block.forward(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y.v[i], x.v[i], 1e-15);
}

TEST(TcmBlock, PreservesShape) {
  std::mt19937_64 rng(9);
  for (int c : {16, 32}) {
    TcmBlock block(c, 4);
    block.init(rng, 1.0);
    const Tensor y = block.forward(oracle::random_tensor(c, 8, 8, rng));
    EXPECT_EQ(y.c, c);
    EXPECT_EQ(y.h, 8);
    EXPECT_EQ(y.w, 8);
  }
}

TEST(TcmBlock, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(10);
  TcmBlock block(8, 4);
  block.init(rng, 1.0);
  expect_gradients_match(block, oracle::random_tensor(8, 6, 5, rng), 15);
}

TEST(Kernels, ParallelAndSerialAgreeBitwise) {
  std::mt19937_64 rng(11);
  Conv2d conv(5, 7, 3, 2, 1);
  conv.init(rng, 1.0);
  oracle::fill_uniform(conv.bias.value, rng, -1.0, 1.0);
  const Tensor x = oracle::random_tensor(5, 13, 11, rng);
  EXPECT_EQ(conv.forward(x), serial::conv2d_forward(conv, x));

  ConvTranspose2d up(5, 3, 4, 2, 1);
  up.init(rng, 1.0);
  oracle::fill_uniform(up.bias.value, rng, -1.0, 1.0);
  EXPECT_EQ(up.forward(x), serial::conv_transpose2d_forward(up, x));
}

TEST(Tensor, PadCropAndAdjoints) {
  std::mt19937_64 rng(12);
  const Tensor x = oracle::random_tensor(2, 5, 7, rng);
  const Tensor p = pad_to_multiple(x, 4);
  EXPECT_EQ(p.h, 8);
  EXPECT_EQ(p.w, 8);
  EXPECT_EQ(p.at(1, 7, 7), x.at(1, 4, 6));
  EXPECT_EQ(crop(p, 5, 7), x);
  // <pad(x), g> == <x, unpad_gradient(g)>
  const Tensor g = oracle::random_tensor(2, 8, 8, rng);
  EXPECT_NEAR(oracle::probe(p, g), oracle::probe(x, unpad_gradient(g, 5, 7)), 1e-12);
}
