// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "depthcodec/image.hpp"

namespace depthcodec {

struct LossWeights {
  double lambda = 0.05;
  double tv_weight = 0.001;
  double tau = 0.05;  // relative confidence threshold, in (0, 1)

  void validate() const;  // throws InvalidArgument
};

struct LossParts {
  double mse = 0.0;
  double bpp = 0.0;
  double conf = 0.0;
  double tv = 0.0;
};

// Depth terms operate on depth normalized to [0, 1]. When `grad` is non-null it
// is overwritten with d(loss)/d(pred).

// Mean squared error over valid pixels. Throws EmptyMask.
double loss_mse(const RealPlane& pred, const RealPlane& target, const MaskPlane& mask,
                RealPlane* grad = nullptr);

// Squared error restricted to pixels whose error exceeds tau·max|error|,
// normalized by the full valid count. The selection is held constant for the
// gradient. Throws EmptyMask.
double loss_conf(const RealPlane& pred, const RealPlane& target, const MaskPlane& mask,
                 double tau, RealPlane* grad = nullptr);

// Isotropic total variation summed over pixels that have both a right and a
// lower neighbour. Zero-gradient pixels contribute a zero subgradient.
double loss_tv(const RealPlane& pred, RealPlane* grad = nullptr);

struct RateGradient {
  std::vector<double> d_value, d_mean, d_scale;
};

// Σ −log2 p(value | mean, scale) / pixel_count over Gaussian unit-interval
// likelihoods floored at 2⁻¹⁶. Floored elements contribute no gradient.
double loss_bpp(std::span<const double> values, std::span<const double> means,
                std::span<const double> scales, double pixel_count, RateGradient* grad = nullptr);

// λ·255²·mse + bpp + conf + w_tv·tv. Throws NonFinite.
double loss_total(const LossParts& parts, const LossWeights& weights);

}  // namespace depthcodec
