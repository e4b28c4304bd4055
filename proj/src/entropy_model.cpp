// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/entropy_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace depthcodec {
namespace {

double upper_tail(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }
double density(double u) {
  return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

}  // namespace

IntervalLikelihood gaussian_interval(double value, double mean, double scale) {
  // Evaluated on |value - mean| with upper tails, so the result is exactly
  // symmetric and keeps precision far from the mean.
  const double d = value - mean;
  const double a = std::abs(d);
  const double u1 = (a - 0.5) / scale;
  const double u2 = (a + 0.5) / scale;
  IntervalLikelihood out;
  out.p = upper_tail(u1) - upper_tail(u2);
  if (!(out.p >= kLikelihoodFloor)) {
    out.p = kLikelihoodFloor;
    out.floored = true;
    return out;
  }
  const double f1 = density(u1), f2 = density(u2);
  const double dp_da = (f2 - f1) / scale;
  out.d_value = d >= 0.0 ? dp_da : -dp_da;
  out.d_mean = -out.d_value;
  out.d_scale = (f1 * u1 - f2 * u2) / scale;
  return out;
}

double likelihood_y(double value, double mean, double scale) {
  return gaussian_interval(value, mean, std::max(scale, kScaleFloor)).p;
}

double scale_from_raw(double raw) {
  const double sp = raw > 30.0 ? raw : std::log1p(std::exp(raw));
  return std::max(sp, kScaleFloor);
}

double scale_from_raw_derivative(double raw) {
  const double sp = raw > 30.0 ? raw : std::log1p(std::exp(raw));
  if (sp < kScaleFloor) return 0.0;
  return 1.0 / (1.0 + std::exp(-raw));
}

int latent_symbol(double value) {
  const double r = std::clamp(std::round(value), -static_cast<double>(kLatentBound),
                              static_cast<double>(kLatentBound));
  return static_cast<int>(r) + kLatentBound;
}

double latent_value(std::uint32_t symbol) {
  return static_cast<double>(static_cast<int>(symbol) - kLatentBound);
}

CdfTable latent_cdf(double mean, double scale) {
  scale = std::max(scale, kScaleFloor);
  const double reach = kCdfWindowSigmas * scale + 0.5;
  std::array<double, kLatentAlphabet> p{};
  for (int s = 0; s < kLatentAlphabet; ++s) {
    const double v = s - kLatentBound;
    if (std::abs(v - mean) > reach) continue;
    const double a = std::abs(v - mean);
    p[s] = upper_tail((a - 0.5) / scale) - upper_tail((a + 0.5) / scale);
  }
  return CdfTable::from_probabilities(p);
}

}  // namespace depthcodec
