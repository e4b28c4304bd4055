// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "depthcodec/error.hpp"

namespace depthcodec {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RealPlane draw_scene(const SyntheticConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double span = cfg.z_far - cfg.z_near;
  const int w = cfg.width, h = cfg.height;
  RealPlane z(static_cast<std::size_t>(w), static_cast<std::size_t>(h));

  const double base = cfg.z_near + span * (0.65 + 0.25 * u(rng));
  const double sx = span * 0.1 * (2.0 * u(rng) - 1.0);
  const double sy = span * 0.1 * (2.0 * u(rng) - 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      z(x, y) = base + sx * (x / double(w) - 0.5) + sy * (y / double(h) - 0.5);
    }
  }

  std::uniform_int_distribution<int> count(cfg.min_objects, std::max(cfg.min_objects, cfg.max_objects));
  const int objects = count(rng);
  for (int o = 0; o < objects; ++o) {
    const double cx = w * u(rng), cy = h * u(rng);
    const double rx = w * (0.1 + 0.25 * u(rng)), ry = h * (0.1 + 0.25 * u(rng));
    const bool ellipse = u(rng) < 0.5;
    const double z0 = cfg.z_near + span * (0.05 + 0.45 * u(rng));
    const double tx = span * 0.08 * (2.0 * u(rng) - 1.0), ty = span * 0.08 * (2.0 * u(rng) - 1.0);
    const double qx = span * 0.06 * (2.0 * u(rng) - 1.0), qy = span * 0.06 * (2.0 * u(rng) - 1.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double a = (x - cx) / rx, b = (y - cy) / ry;
        const bool inside = ellipse ? a * a + b * b <= 1.0 : std::abs(a) <= 1.0 && std::abs(b) <= 1.0;
        if (!inside) continue;
        const double v = z0 + tx * a + ty * b + qx * a * a + qy * b * b;
        z(x, y) = std::min(z(x, y), v);
      }
    }
  }
  for (double& v : z.storage()) {
    v = static_cast<double>(static_cast<float>(std::clamp(v, cfg.z_near, cfg.z_far)));
  }
  return z;
}

}  // namespace

double discontinuity_fraction(const DepthMap& depth, double threshold) {
  const std::size_t w = depth.values.width(), h = depth.values.height();
  if (w == 0 || h == 0) return 0.0;
  std::size_t edges = 0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!depth.valid(x, y)) continue;
      const double v = depth.values(x, y);
      const bool right = x + 1 < w && depth.valid(x + 1, y) && std::abs(depth.values(x + 1, y) - v) > threshold;
      const bool down = y + 1 < h && depth.valid(x, y + 1) && std::abs(depth.values(x, y + 1) - v) > threshold;
      edges += right || down;
    }
  }
  return static_cast<double>(edges) / static_cast<double>(w * h);
}

DepthMap generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  if (cfg.width < 1 || cfg.height < 1 || !(cfg.z_far > cfg.z_near) || cfg.min_objects < 0 ||
      !(cfg.invalid_fraction >= 0.0 && cfg.invalid_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "bad synthetic scene configuration");
  }
  std::mt19937_64 rng(seed);
  const double threshold = cfg.edge_threshold * (cfg.z_far - cfg.z_near);
  RealPlane values;
  for (int attempt = 0; attempt < 64; ++attempt) {
    values = draw_scene(cfg, rng);
    const double f = discontinuity_fraction(DepthMap::from_values(values), threshold);
    if (f >= cfg.edge_band_lo && f <= cfg.edge_band_hi) break;
  }
  MaskPlane valid(values.width(), values.height(), 1);
  if (cfg.invalid_fraction > 0.0) {
    std::bernoulli_distribution hole(cfg.invalid_fraction);
    for (auto& m : valid.storage()) m = hole(rng) ? 0 : 1;
    valid[0] = 1;  // never all-invalid
  }
  return DepthMap::from_values(std::move(values), std::move(valid));
}

std::vector<DepthMap> generate_corpus(const SyntheticConfig& config, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "corpus needs at least one map");
  std::vector<DepthMap> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(generate_synthetic(config, splitmix(seed + static_cast<std::uint64_t>(i))));
  return out;
}

}  // namespace depthcodec
