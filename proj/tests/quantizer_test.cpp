// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/quantizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthcodec/error.hpp"

namespace depthcodec {
namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize_value(0.0, 4), 0);
  EXPECT_EQ(quantize_value(1.0, 4), 15);
  EXPECT_EQ(quantize_value(0.5, 4), 8);  // 7.5 rounds away from zero
  EXPECT_EQ(quantize_value(-0.3, 4), 0);
  EXPECT_EQ(quantize_value(1.7, 4), 15);
}

TEST(Dequantize, Examples) {
  EXPECT_EQ(dequantize_value(15, 4), 1.0);
  EXPECT_DOUBLE_EQ(dequantize_value(8, 4), 8.0 / 15.0);
}

TEST(Quantize, BitsAreRangeChecked) {
  RealPlane p(2, 2, 0.5);
  EXPECT_EQ(error_of([&] { quantize_uniform(p, 0); }), ErrorCode::BitsOutOfRange);
  EXPECT_EQ(error_of([&] { quantize_uniform(p, 9); }), ErrorCode::BitsOutOfRange);
  SymbolPlane s(1, 1, 16);
  EXPECT_EQ(error_of([&] { dequantize_uniform(s, 4); }), ErrorCode::SymbolOutOfRange);
}

TEST(Quantize, DenseSweepErrorBound) {
  for (int bits = 1; bits <= 8; ++bits) {
    const double half_step = 0.5 / (std::ldexp(1.0, bits) - 1.0);
    double worst = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double v = i / 100000.0;
      worst = std::max(worst, std::abs(fake_quantize(v, bits) - v));
    }
    EXPECT_LE(worst, half_step + 1e-12) << bits;
    if (bits == 4) EXPECT_LE(worst, 1.0 / 30.0 + 1e-12);
  }
}

TEST(Quantize, IdempotentAndBoundedProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-0.5, 1.5);
  std::uniform_int_distribution<int> bits_dist(1, 8);
  for (int i = 0; i < 20000; ++i) {
    const double v = dist(rng);
    const int bits = bits_dist(rng);
    const std::uint16_t q = quantize_value(v, bits);
    EXPECT_EQ(quantize_value(dequantize_value(q, bits), bits), q);
    EXPECT_LE(std::abs(dequantize_value(q, bits) - std::clamp(v, 0.0, 1.0)),
              1.0 / (std::ldexp(1.0, bits) - 1.0));
  }
}

TEST(TrainProxy, SteForwardMatchesInferencePath) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> in(1000), out(1000);
  for (auto& v : in) v = dist(rng);
  in[0] = 0.5;
  quantize_train_proxy(in, out, 4, ProxyMode::Ste, rng);
  EXPECT_DOUBLE_EQ(out[0], 8.0 / 15.0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i], dequantize_value(quantize_value(in[i], 4), 4));
  }
}

TEST(TrainProxy, RejectsUnboundedBits) {
  std::mt19937_64 rng(0);
  std::vector<double> in(1, 0.5), out(1);
  EXPECT_EQ(error_of([&] { quantize_train_proxy(in, out, 12, ProxyMode::Noise, rng); }),
            ErrorCode::BitsOutOfRange);
}

TEST(TrainProxy, NoiseIsUnbiased) {
  // Mean of N draws of v + U(-step/2, step/2) deviates from v with standard
  // error step / sqrt(12 N); allow three of those.
  std::mt19937_64 rng(21);
  const int n = 200000;
  const int bits = 4;
  const double step = 1.0 / 15.0;
  const double v = 0.3141;
  std::vector<double> in(n, v), out(n);
  quantize_train_proxy(in, out, bits, ProxyMode::Noise, rng);
  double mean = 0.0;
  double widest = 0.0;
  for (double x : out) {
    mean += x;
    widest = std::max(widest, std::abs(x - v));
  }
  mean /= n;
  EXPECT_LE(std::abs(mean - v), 3.0 * step / std::sqrt(12.0 * n));
  EXPECT_LE(widest, step / 2);
}

MwdImage blue_only(RealPlane blue) {
  MwdImage m;
  m.r = RealPlane(blue.width(), blue.height(), 0.5);
  m.g = RealPlane(blue.width(), blue.height(), 1.0);
  m.b = std::move(blue);
  return m;
}

TEST(Adaptive, ConstantImageUsesLowBits) {
  auto [q, map] = adaptive_quantize(blue_only(RealPlane(20, 12, 0.4)), 8, 2, 6);
  EXPECT_EQ(map.patches_x, 3u);
  EXPECT_EQ(map.patches_y, 2u);
  for (auto b : map.bits) EXPECT_EQ(b, 2);
  EXPECT_EQ(q.bits_b, 6);
}

TEST(Adaptive, FlatAndBusyHalvesSplitBits) {
  RealPlane blue(8, 4, 0.2);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 4; x < 8; ++x) blue(x, y) = 0.1 * static_cast<double>(x + y);
  }
  auto [q, map] = adaptive_quantize(blue_only(blue), 4, 2, 6);
  ASSERT_EQ(map.bits.size(), 2u);
  EXPECT_EQ(map.bits[0], 2);
  EXPECT_EQ(map.bits[1], 6);
  EXPECT_GT(map.complexity[1], 0.0);
  EXPECT_EQ(map.complexity[0], 0.0);
}

TEST(Adaptive, SideInformationSize) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  RealPlane blue(37, 29);
  for (auto& v : blue.pixels()) v = dist(rng) * dist(rng);
  for (auto [lo, hi] : {std::pair{2, 6}, std::pair{4, 4}, std::pair{1, 8}, std::pair{3, 4}}) {
    auto [q, map] = adaptive_quantize(blue_only(blue), 5, lo, hi);
    const auto bytes = serialize_quant_map(map);
    const std::size_t code_bits =
        map.patch_count() * static_cast<std::size_t>(std::ceil(std::log2(hi - lo + 1)));
    EXPECT_EQ(map.code_width(), static_cast<int>(std::ceil(std::log2(hi - lo + 1))));
    EXPECT_EQ(bytes.size(), 4 + (code_bits + 7) / 8);
    const AdaptiveQuantMap back = parse_quant_map(bytes, 37, 29);
    EXPECT_EQ(back.bits, map.bits);
    EXPECT_EQ(back.patch_size, 5);
    for (std::size_t i = 0; i < q.b.size(); ++i) {
      const int bits = map.bits_at(i % 37, i / 37);
      ASSERT_LT(q.b[i], 1u << bits);
    }
    const MwdImage deq = adaptive_dequantize(q, back, FringeParams{});
    for (std::size_t i = 0; i < blue.size(); ++i) {
      const int bits = map.bits_at(i % 37, i / 37);
      ASSERT_LE(std::abs(deq.b[i] - blue[i]), 0.5 / (std::ldexp(1.0, bits) - 1.0) + 1e-12);
    }
  }
}

TEST(Adaptive, TruncatedMapIsRejected) {
  AdaptiveQuantMap map;
  map.patch_size = 4;
  map.bit_lo = 2;
  map.bit_hi = 6;
  map.patches_x = 4;
  map.patches_y = 4;
  map.bits.assign(16, 3);
  auto bytes = serialize_quant_map(map);
  bytes.pop_back();
  EXPECT_EQ(error_of([&] { parse_quant_map(bytes, 16, 16); }), ErrorCode::TruncatedStream);
}

TEST(Kernels, QuantizeParallelMatchesSerial) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist(-0.1, 1.1);
  RealPlane p(123, 77);
  for (auto& v : p.pixels()) v = dist(rng);
  const SymbolPlane q = quantize_uniform(p, 5);
  EXPECT_EQ(q, serial::quantize_uniform(p, 5));
  EXPECT_EQ(dequantize_uniform(q, 5), serial::dequantize_uniform(q, 5));
}

}  // namespace
}  // namespace depthcodec
