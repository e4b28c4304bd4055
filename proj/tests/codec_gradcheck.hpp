// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

// Finite-difference check of the whole codec's parameter gradient on one
// sample. Probes whose ±h evaluations change any discrete decision (fringe
// order, confidence selection, floors, phase branch) straddle a kink and are
// redrawn.

#pragma once

#include <cmath>
#include <random>

#include "depthcodec/toy_codec.hpp"
#include "grad_oracle.hpp"

namespace oracle {

struct CodecGradCheck {
  int checked = 0;
  int redrawn = 0;
  double worst = 0.0;
};

inline CodecGradCheck check_codec_gradient(depthcodec::CodecModel& model,
                                           const depthcodec::TrainSample& sample,
                                           const depthcodec::TrainOptions& options,
                                           int samples, std::uint64_t seed) {
  constexpr std::uint64_t kNoiseSeed = 0x5eed;
  constexpr double kStep = 1e-4;
  model.zero_grad();
  const auto base = depthcodec::accumulate_gradients(model, sample, options, kNoiseSeed);
  // Differences of a loss of size |L| carry roundoff near 1e-16·|L|/h.
  const double floor = 1e-8 * (1.0 + std::abs(base.total));
  auto params = model.parameters();
  std::mt19937_64 rng(seed);
  CodecGradCheck out;
  while (out.checked < samples && out.redrawn < 50 * samples) {
    auto* p = params[rng() % params.size()];
    const std::size_t j = rng() % p->size();
    const double orig = p->value[j];
    p->value[j] = orig + kStep;
    const auto up = depthcodec::evaluate_sample(model, sample, options, kNoiseSeed);
    p->value[j] = orig - kStep;
    const auto down = depthcodec::evaluate_sample(model, sample, options, kNoiseSeed);
    p->value[j] = orig;
    if (up.signature != base.signature || down.signature != base.signature) {
      ++out.redrawn;
      continue;
    }
    const double numeric = (up.total - down.total) / (2.0 * kStep);
    out.worst = std::max(out.worst, relative_error(p->grad[j], numeric, floor));
    ++out.checked;
  }
  return out;
}

}  // namespace oracle
