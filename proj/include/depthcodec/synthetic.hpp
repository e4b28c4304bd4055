// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "depthcodec/image.hpp"

namespace depthcodec {

// Piecewise-smooth scenes: a tilted background plane occluded by rectangular
// and elliptical foreground patches carrying quadric surfaces.
struct SyntheticConfig {
  int width = 128;
  int height = 128;
  double z_near = 500.0;  // depth units (mm by convention)
  double z_far = 4000.0;
  int min_objects = 2;
  int max_objects = 5;
  double invalid_fraction = 0.0;  // Bernoulli holes; 0 disables the mask
  // Per-pixel jump, relative to z_far - z_near, that counts as a discontinuity.
  double edge_threshold = 0.05;
  // Scenes are redrawn until their discontinuity fraction falls in this band.
  double edge_band_lo = 0.01;
  double edge_band_hi = 0.25;
};

// Values are float32-representable so they survive the on-disk format exactly.
DepthMap generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);
std::vector<DepthMap> generate_corpus(const SyntheticConfig& config, int count, std::uint64_t seed);

// Share of pixels whose right or lower valid neighbour differs by more than
// `threshold` depth units.
double discontinuity_fraction(const DepthMap& depth, double threshold);

}  // namespace depthcodec
