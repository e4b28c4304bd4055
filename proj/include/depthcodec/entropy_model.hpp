// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "depthcodec/range_coder.hpp"

namespace depthcodec {

inline constexpr double kLikelihoodFloor = 1.0 / 65536.0;
inline constexpr double kScaleFloor = 1e-6;
// Latent symbols live on the integer lattice [-kLatentBound, kLatentBound].
inline constexpr int kLatentBound = 64;
inline constexpr int kLatentAlphabet = 2 * kLatentBound + 1;
// Table entries further than this many σ from μ get only the floor count.
inline constexpr double kCdfWindowSigmas = 12.0;

// Probability mass of the unit interval centred on `value` under N(mean, scale²),
// with partial derivatives. When the mass falls below the floor the value is
// clamped and all derivatives are zero.
struct IntervalLikelihood {
  double p = 0.0;
  double d_value = 0.0;
  double d_mean = 0.0;
  double d_scale = 0.0;
  bool floored = false;
};

IntervalLikelihood gaussian_interval(double value, double mean, double scale);
double likelihood_y(double value, double mean, double scale);

// σ parameterization used by the conditional model: max(softplus(raw), floor).
double scale_from_raw(double raw);
double scale_from_raw_derivative(double raw);

int latent_symbol(double value);  // round-and-clamp, offset to [0, alphabet)
double latent_value(std::uint32_t symbol);

// Fixed-point table for one latent element; identical inputs give identical tables.
CdfTable latent_cdf(double mean, double scale);

}  // namespace depthcodec
