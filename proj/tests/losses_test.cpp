// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthcodec/entropy_model.hpp"
#include "depthcodec/error.hpp"
#include "depthcodec/losses.hpp"
#include "grad_oracle.hpp"

using namespace depthcodec;

namespace {

RealPlane plane(std::size_t w, std::size_t h, std::initializer_list<double> values) {
  RealPlane p(w, h);
  std::size_t i = 0;
  for (double v : values) p[i++] = v;
  return p;
}

RealPlane random_plane(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  RealPlane p(w, h);
  oracle::fill_uniform(p.storage(), rng, 0.0, 1.0);
  return p;
}

// Simpson integration of the standard normal density in long double.
long double normal_mass(long double a, long double b) {
  const int n = 20000;
  const long double hstep = (b - a) / n;
  long double s = 0.0L;
  for (int i = 0; i <= n; ++i) {
    const long double x = a + hstep * i;
    const long double f = std::exp(-0.5L * x * x);
    s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return s * hstep / 3.0L / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
}

template <typename Fn>
void expect_plane_gradient(Fn loss, RealPlane pred, double tol, double floor) {
  RealPlane grad;
  loss(pred, &grad);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double num = oracle::central_difference([&] { return loss(pred, nullptr); }, pred[i], 1e-6);
    EXPECT_LE(oracle::relative_error(grad[i], num, floor), tol) << "pixel " << i;
  }
}

}  // namespace

TEST(Mse, ExactReconstructionIsZero) {
  const RealPlane z = plane(2, 2, {0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(loss_mse(z, z, MaskPlane(2, 2, 1)), 0.0);
}

TEST(Mse, UniformErrorGivesItsSquare) {
  const RealPlane z = plane(2, 2, {0.0, 0.25, 0.5, 0.5});
  const RealPlane p = plane(2, 2, {0.25, 0.5, 0.75, 0.75});
  EXPECT_EQ(loss_mse(p, z, MaskPlane(2, 2, 1)), 0.0625);
}

TEST(Mse, MaskedPixelsAreIgnored) {
  const RealPlane z(4, 1, 0.0);
  const RealPlane p = plane(4, 1, {0.5, 0.5, 100.0, -7.0});
  MaskPlane m(4, 1, 1);
  m[2] = m[3] = 0;
  EXPECT_EQ(loss_mse(p, z, m), 0.25);
}

TEST(Mse, EmptyMaskIsAnError) {
  try {
    loss_mse(RealPlane(2, 2), RealPlane(2, 2), MaskPlane(2, 2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMask);
  }
}

TEST(Conf, ThresholdSelectsLargeErrors) {
  const RealPlane z(3, 1, 0.0);
  const MaskPlane m(3, 1, 1);
  EXPECT_EQ(loss_conf(plane(3, 1, {1.0, 2.0, 10.0}), z, m, 0.05), 35.0);
  EXPECT_EQ(loss_conf(plane(3, 1, {0.0, 0.0, 10.0}), z, m, 0.05), 100.0 / 3.0);
  EXPECT_EQ(loss_conf(z, z, m, 0.05), 0.0);
}

TEST(Conf, NormalizesByAllValidPixels) {
  // Only the 10 clears the threshold but the divisor is the 4 valid pixels.
  const RealPlane z(5, 1, 0.0);
  MaskPlane m(5, 1, 1);
  m[4] = 0;
  EXPECT_EQ(loss_conf(plane(5, 1, {0.1, 0.2, 0.0, 10.0, 99.0}), z, m, 0.05), 25.0);
}

TEST(Conf, EmptyMaskIsAnError) {
  EXPECT_THROW(loss_conf(RealPlane(2, 2), RealPlane(2, 2), MaskPlane(2, 2, 0), 0.05), Error);
}

TEST(TotalVariation, KnownValues) {
  EXPECT_EQ(loss_tv(RealPlane(5, 4, 0.7)), 0.0);
  EXPECT_EQ(loss_tv(plane(2, 2, {0.0, 1.0, 0.0, 1.0})), 1.0);
  // 3×2 ramp: two interior terms, each of unit horizontal step.
  EXPECT_EQ(loss_tv(plane(3, 2, {0.0, 1.0, 2.0, 0.0, 1.0, 2.0})), 2.0);
  EXPECT_THROW(loss_tv(RealPlane(1, 5)), Error);
}

TEST(Gradients, TotalVariationMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  RealPlane p(9, 7);
  for (std::size_t y = 0; y < 7; ++y) {
    for (std::size_t x = 0; x < 9; ++x) p(x, y) = std::sin(0.4 * x) * std::cos(0.3 * y) + 0.05 * x;
  }
  expect_plane_gradient([](const RealPlane& q, RealPlane* g) { return loss_tv(q, g); }, p, 1e-4, 1e-6);
}

TEST(Gradients, MseMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const RealPlane z = random_plane(6, 5, rng);
  MaskPlane m(6, 5, 1);
  m[3] = m[17] = 0;
  expect_plane_gradient([&](const RealPlane& q, RealPlane* g) { return loss_mse(q, z, m, g); },
                        random_plane(6, 5, rng), 1e-6, 1e-8);
}

TEST(Gradients, ConfMatchesFiniteDifferencesAwayFromThreshold) {
  std::mt19937_64 rng(3);
  const RealPlane z = random_plane(6, 5, rng);
  RealPlane p = z;
  // Errors are either tiny (well under τ·max) or large, so a 1e-6 probe never
  // flips the selection.
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += (i % 3 == 0) ? 0.3 + 0.01 * i : 1e-3;
  expect_plane_gradient([&](const RealPlane& q, RealPlane* g) {
    return loss_conf(q, z, MaskPlane(6, 5, 1), 0.05, g);
  }, p, 1e-6, 1e-8);
}

TEST(Gradients, BppMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const std::size_t n = 40;
  std::vector<double> v(n), mu(n), sigma(n);
  oracle::fill_uniform(v, rng, -4.0, 4.0);
  oracle::fill_uniform(mu, rng, -2.0, 2.0);
  oracle::fill_uniform(sigma, rng, 0.3, 3.0);
  RateGradient g;
  const double base = loss_bpp(v, mu, sigma, 64.0, &g);
  EXPECT_GT(base, 0.0);
  auto f = [&] { return loss_bpp(v, mu, sigma, 64.0); };
  for (std::size_t i = 0; i < n; ++i) {
    if (likelihood_y(v[i], mu[i], sigma[i]) <= 2.0 * kLikelihoodFloor) continue;
    EXPECT_LE(oracle::relative_error(g.d_value[i], oracle::central_difference(f, v[i], 1e-6), 1e-8), 1e-5);
    EXPECT_LE(oracle::relative_error(g.d_mean[i], oracle::central_difference(f, mu[i], 1e-6), 1e-8), 1e-5);
    EXPECT_LE(oracle::relative_error(g.d_scale[i], oracle::central_difference(f, sigma[i], 1e-6), 1e-8), 1e-5);
  }
}

TEST(Total, Composition) {
  const LossWeights w;
  EXPECT_EQ(loss_total({}, w), 0.0);
  LossWeights w05;
  w05.lambda = 0.05;
  EXPECT_EQ(loss_total({1.0 / (255.0 * 255.0), 1.0, 0.0, 0.0}, w05), 1.05);
  LossWeights w10 = w05;
  w10.lambda = 0.1;
  const LossParts parts{1e-3, 0.4, 0.0, 3.0};
  EXPECT_GT(loss_total(parts, w10), loss_total(parts, w05));
}

TEST(Total, NonFiniteTermIsAnError) {
  try {
    loss_total({NAN, 0.0, 0.0, 0.0}, LossWeights{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_THROW(loss_total({0.0, INFINITY, 0.0, 0.0}, LossWeights{}), Error);
}

TEST(Weights, TauMustBeInsideUnitInterval) {
  LossWeights w;
  EXPECT_NO_THROW(w.validate());
  w.tau = 1.0;
  EXPECT_THROW(w.validate(), Error);
  w.tau = 0.0;
  EXPECT_THROW(w.validate(), Error);
}

TEST(Likelihood, UnitScaleAtMean) {
  const double oracle_p = static_cast<double>(normal_mass(-0.5L, 0.5L));
  EXPECT_NEAR(likelihood_y(0.0, 0.0, 1.0), oracle_p, 1e-12);
  EXPECT_NEAR(likelihood_y(0.0, 0.0, 1.0), 0.3829, 5e-5);
}

TEST(Likelihood, WideScaleApproachesDensityTimesWidth) {
  for (double sigma : {10.0, 50.0, 200.0}) {
    const double oracle_p = static_cast<double>(normal_mass(-0.5L / sigma, 0.5L / sigma));
    EXPECT_NEAR(likelihood_y(3.0, 3.0, sigma), oracle_p, 1e-12 * oracle_p + 1e-15);
    EXPECT_NEAR(likelihood_y(3.0, 3.0, sigma), 1.0 / (sigma * std::sqrt(2.0 * M_PI)), 1e-3 / sigma);
  }
}

TEST(Likelihood, SymmetricFlooredAndBounded) {
  std::mt19937_64 rng(5);
  // Dyadic offsets keep mu ± a exact, so symmetry can be checked bitwise.
  std::uniform_int_distribution<int> u(-1280, 1280);
  std::uniform_real_distribution<double> s(1e-7, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double mu = u(rng) / 64.0, a = u(rng) / 64.0, sigma = s(rng);
    const double p = likelihood_y(mu + a, mu, sigma);
    EXPECT_EQ(p, likelihood_y(mu - a, mu, sigma));
    EXPECT_GE(p, kLikelihoodFloor);
    EXPECT_LE(p, 1.0);
  }
  EXPECT_EQ(likelihood_y(40.0, 0.0, 1.0), kLikelihoodFloor);
}

TEST(LatentTable, PeaksAtMeanAndFloorsOutsideWindow) {
  const CdfTable t = latent_cdf(2.3, 0.8);
  ASSERT_TRUE(t.valid());
  EXPECT_EQ(t.alphabet_size(), static_cast<std::size_t>(kLatentAlphabet));
  std::size_t best = 0;
  for (std::size_t s = 0; s < t.alphabet_size(); ++s) {
    if (t.freq(s) > t.freq(best)) best = s;
  }
  EXPECT_EQ(latent_value(static_cast<std::uint32_t>(best)), 2.0);
  EXPECT_EQ(t.freq(static_cast<std::size_t>(latent_symbol(-40.0))), 1u);
  // Means far outside the lattice still give a usable table.
  EXPECT_TRUE(latent_cdf(1e6, 1.0).valid());
}

TEST(LatentTable, SymbolMappingClampsToLattice) {
  EXPECT_EQ(latent_symbol(0.4), kLatentBound);
  EXPECT_EQ(latent_symbol(-0.5), kLatentBound - 1);
  EXPECT_EQ(latent_symbol(1e9), kLatentAlphabet - 1);
  EXPECT_EQ(latent_symbol(-1e9), 0);
  EXPECT_EQ(latent_value(static_cast<std::uint32_t>(latent_symbol(-7.2))), -7.0);
}
