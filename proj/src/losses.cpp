// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthcodec/entropy_model.hpp"
#include "depthcodec/error.hpp"

namespace depthcodec {
namespace {

std::size_t checked_valid_count(const RealPlane& pred, const RealPlane& target,
                                const MaskPlane& mask) {
  if (!pred.same_shape(target) || !pred.same_shape(mask)) {
    throw Error(ErrorCode::InvalidArgument, "loss operand shapes differ");
  }
  std::size_t n = 0;
  for (std::uint8_t m : mask.pixels()) n += m != 0;
  if (n == 0) throw Error(ErrorCode::EmptyMask, "no valid pixels");
  return n;
}

void reset_grad(RealPlane* grad, const RealPlane& like) {
  if (grad != nullptr) *grad = RealPlane(like.width(), like.height());
}

}  // namespace

void LossWeights::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (!(tv_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tv weight must be non-negative");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1)");
}

double loss_mse(const RealPlane& pred, const RealPlane& target, const MaskPlane& mask,
                RealPlane* grad) {
  const std::size_t n = checked_valid_count(pred, target, mask);
  reset_grad(grad, pred);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask[i] == 0) continue;
    const double e = pred[i] - target[i];
    sum += e * e;
    if (grad != nullptr) (*grad)[i] = 2.0 * e / static_cast<double>(n);
  }
  return sum / static_cast<double>(n);
}

double loss_conf(const RealPlane& pred, const RealPlane& target, const MaskPlane& mask,
                 double tau, RealPlane* grad) {
  const std::size_t n = checked_valid_count(pred, target, mask);
  reset_grad(grad, pred);
  double peak = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask[i] != 0) peak = std::max(peak, std::abs(pred[i] - target[i]));
  }
  const double threshold = tau * peak;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask[i] == 0) continue;
    const double e = pred[i] - target[i];
    if (!(std::abs(e) > threshold)) continue;
    sum += e * e;
    if (grad != nullptr) (*grad)[i] = 2.0 * e / static_cast<double>(n);
  }
  return sum / static_cast<double>(n);
}

double loss_tv(const RealPlane& pred, RealPlane* grad) {
  const int w = static_cast<int>(pred.width()), h = static_cast<int>(pred.height());
  if (w < 2 || h < 2) throw Error(ErrorCode::InvalidArgument, "total variation needs at least 2x2");
  reset_grad(grad, pred);
  double sum = 0.0;
  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      const double dv = pred(x, y + 1) - pred(x, y);
      const double dh = pred(x + 1, y) - pred(x, y);
      const double mag = std::sqrt(dv * dv + dh * dh);
      sum += mag;
      if (grad != nullptr && mag > 0.0) {
        (*grad)(x, y + 1) += dv / mag;
        (*grad)(x + 1, y) += dh / mag;
        (*grad)(x, y) -= (dv + dh) / mag;
      }
    }
  }
  return sum;
}

double loss_bpp(std::span<const double> values, std::span<const double> means,
                std::span<const double> scales, double pixel_count, RateGradient* grad) {
  const std::size_t n = values.size();
  if (means.size() != n || scales.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "rate operand sizes differ");
  }
  if (!(pixel_count > 0.0)) throw Error(ErrorCode::InvalidArgument, "pixel count must be positive");
  if (grad != nullptr) {
    grad->d_value.assign(n, 0.0);
    grad->d_mean.assign(n, 0.0);
    grad->d_scale.assign(n, 0.0);
  }
  const double per_bit = -1.0 / (std::numbers::ln2 * pixel_count);
  double bits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const IntervalLikelihood l = gaussian_interval(values[i], means[i], std::max(scales[i], kScaleFloor));
    bits -= std::log2(l.p);
    if (grad == nullptr || l.floored) continue;
    const double d = per_bit / l.p;
    grad->d_value[i] = d * l.d_value;
    grad->d_mean[i] = d * l.d_mean;
    grad->d_scale[i] = scales[i] >= kScaleFloor ? d * l.d_scale : 0.0;
  }
  return bits / pixel_count;
}

double loss_total(const LossParts& parts, const LossWeights& weights) {
  for (double v : {parts.mse, parts.bpp, parts.conf, parts.tv}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "loss term is not finite");
  }
  return weights.lambda * 255.0 * 255.0 * parts.mse + parts.bpp + parts.conf +
         weights.tv_weight * parts.tv;
}

}  // namespace depthcodec
