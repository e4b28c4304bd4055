// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/range_coder.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthcodec/error.hpp"

namespace depthcodec {
namespace {

CdfTable random_table(std::mt19937_64& rng, std::size_t alphabet) {
  std::gamma_distribution<double> g(0.3, 1.0);
  std::vector<double> p(alphabet);
  for (auto& x : p) x = g(rng);
  return CdfTable::from_probabilities(p);
}

std::vector<std::uint32_t> sample(std::mt19937_64& rng, const CdfTable& t, std::size_t n) {
  std::uniform_int_distribution<std::uint32_t> u(0, t.total() - 1);
  std::vector<std::uint32_t> out(n);
  for (auto& s : out) {
    const std::uint32_t c = u(rng);
    s = static_cast<std::uint32_t>(std::upper_bound(t.cum.begin(), t.cum.end(), c) -
                                   t.cum.begin() - 1);
  }
  return out;
}

TEST(CdfTable, FromProbabilitiesIsValidAndFloored) {
  std::vector<double> p{0.0, 1e-12, 0.5, 0.5, std::nan("")};
  const CdfTable t = CdfTable::from_probabilities(p);
  EXPECT_TRUE(t.valid());
  EXPECT_EQ(t.total(), kProbabilityTotal);
  for (std::size_t s = 0; s < t.alphabet_size(); ++s) EXPECT_GE(t.freq(s), 1u);
}

TEST(RangeCoder, EmptyStreamIsFlushOnly) {
  std::mt19937_64 rng(1);
  const auto a = range_encode(std::span<const std::uint32_t>{}, CdfTable::uniform(16));
  const auto b = range_encode(std::span<const std::uint32_t>{}, random_table(rng, 300));
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(a, b);
}

TEST(RangeCoder, UniformSixteenCostsFourBits) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint32_t> u(0, 15);
  std::vector<std::uint32_t> s(1000);
  for (auto& x : s) x = u(rng);
  const auto bytes = range_encode(s, CdfTable::uniform(16));
  EXPECT_LE(std::abs(static_cast<double>(bytes.size()) - 500.0), 0.001 * 500.0 + 8.0);
  EXPECT_EQ(range_decode(bytes, CdfTable::uniform(16), s.size()), s);
}

TEST(RangeCoder, AllZeroStreamRoundTrips) {
  std::vector<std::uint32_t> s(5000, 0);
  std::mt19937_64 rng(3);
  const CdfTable t = random_table(rng, 8);
  EXPECT_EQ(range_decode(range_encode(s, t), t, s.size()), s);
  EXPECT_EQ(range_decode_adaptive(range_encode_adaptive(s, 8), 8, s.size()), s);
}

TEST(RangeCoder, ExhaustiveBinaryStreams) {
  const std::vector<double> skew{0.9, 0.1};
  const CdfTable t = CdfTable::from_probabilities(skew);
  for (int len = 0; len <= 12; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::vector<std::uint32_t> s(static_cast<std::size_t>(len));
      for (int i = 0; i < len; ++i) s[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
      ASSERT_EQ(range_decode(range_encode(s, t), t, s.size()), s);
      ASSERT_EQ(range_decode_adaptive(range_encode_adaptive(s, 2), 2, s.size()), s);
    }
  }
}

TEST(RangeCoder, RandomizedRoundTripProperty) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> alpha(1, 400), len(0, 600);
  for (int trial = 0; trial < 600; ++trial) {
    const std::size_t n = len(rng);
    const CdfTable t = random_table(rng, alpha(rng));
    const auto s = sample(rng, t, n);
    ASSERT_EQ(range_decode(range_encode(s, t), t, n), s);

    std::vector<CdfTable> per(n);
    std::vector<std::uint32_t> s2(n);
    for (std::size_t i = 0; i < n; ++i) {
      per[i] = random_table(rng, alpha(rng) % 40 + 1);
      s2[i] = sample(rng, per[i], 1)[0];
    }
    ASSERT_EQ(range_decode(range_encode(s2, per), per), s2);

    const std::size_t a = t.alphabet_size();
    ASSERT_EQ(range_decode_adaptive(range_encode_adaptive(s, a), a, n), s);
  }
}

TEST(RangeCoder, NearOptimalLength) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CdfTable t = random_table(rng, 2 + trial * 13);
    const auto s = sample(rng, t, 20000);
    const double ideal = cross_entropy_bits(s, t);
    const double coded = 8.0 * static_cast<double>(range_encode(s, t).size());
    EXPECT_LE(coded, ideal + 0.001 * static_cast<double>(s.size()) + 64.0);
  }
}

TEST(RangeCoder, Deterministic) {
  std::mt19937_64 rng(6);
  const CdfTable t = random_table(rng, 50);
  const auto s = sample(rng, t, 10000);
  EXPECT_EQ(range_encode(s, t), range_encode(s, t));
}

TEST(RangeCoder, ZeroMassSymbolIsModelMismatch) {
  CdfTable t;
  t.cum = {0, 100, 100, 200};
  std::vector<std::uint32_t> s{1};
  try {
    range_encode(s, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelMismatch);
  }
  std::vector<std::uint32_t> outside{7};
  EXPECT_THROW(range_encode(outside, CdfTable::uniform(4)), Error);
}

TEST(RangeCoder, TruncatedStreamIsDetected) {
  std::mt19937_64 rng(7);
  const CdfTable t = random_table(rng, 30);
  const auto s = sample(rng, t, 2000);
  auto bytes = range_encode(s, t);
  bytes.resize(bytes.size() - 3);
  try {
    range_decode(bytes, t, s.size());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncatedStream);
  }
}

TEST(RangeCoder, PerturbedModelNeverCrashes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const CdfTable t = random_table(rng, 20);
    const auto s = sample(rng, t, 300);
    const auto bytes = range_encode(s, t);
    const CdfTable other = random_table(rng, 20);
    try {
      EXPECT_NE(range_decode(bytes, other, s.size()), s);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::ModelMismatch || e.code() == ErrorCode::TruncatedStream);
    }
  }
}

TEST(EstimateBpp, Examples) {
  std::vector<double> half(64, 0.5), one(64, 1.0);
  EXPECT_EQ(estimate_bpp(half, {}, 64), 1.0);
  EXPECT_EQ(estimate_bpp(std::span<const double>(half).first(32),
                         std::span<const double>(half).last(32), 64),
            1.0);
  EXPECT_EQ(estimate_bpp(one, one, 64), 0.0);
  std::vector<double> bad{0.5, 0.0};
  try {
    estimate_bpp(bad, {}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveLikelihood);
  }
}

TEST(EstimateBpp, MatchesCodedSize) {
  std::mt19937_64 rng(9);
  const CdfTable ty = random_table(rng, 40), tz = random_table(rng, 12);
  const auto y = sample(rng, ty, 30000), z = sample(rng, tz, 2000);
  std::vector<double> py, pz;
  for (auto s : y) py.push_back(ty.probability(s));
  for (auto s : z) pz.push_back(tz.probability(s));
  const std::size_t pixels = 65536;
  const double estimated_bytes = estimate_bpp(py, pz, pixels) * pixels / 8.0;
  RangeEncoder enc;
  for (auto s : y) encode_symbol(enc, ty, s);
  for (auto s : z) encode_symbol(enc, tz, s);
  const double actual_bytes = static_cast<double>(enc.finish().size());
  EXPECT_LE(std::abs(actual_bytes - estimated_bytes), 0.005 * estimated_bytes + 8.0);
}

}  // namespace
}  // namespace depthcodec
