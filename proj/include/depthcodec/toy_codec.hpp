// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "depthcodec/image.hpp"
#include "depthcodec/losses.hpp"
#include "depthcodec/mwd.hpp"
#include "depthcodec/nn/layers.hpp"
#include "depthcodec/quantizer.hpp"

namespace depthcodec {

inline constexpr int kAnalysisStride = 16;
inline constexpr int kHyperStride = 4;

struct CodecConfig {
  int features = 32;         // N, width of the transform stacks
  int latent_channels = 32;  // C_y
  int hyper_channels = 16;   // C_z
  int hyper_features = 32;   // width of h_a / h_s
  int window = 4;            // attention tile edge

  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

class CodecModel {
 public:
  explicit CodecModel(const CodecConfig& config = {});

  // Random initialization; the final synthesis bias is 0.5 (mid-grey MWD).
  void init(std::uint64_t seed);

  const CodecConfig& config() const noexcept { return config_; }
  // Declaration order: g_a, g_s, h_a, h_s, z_mean, z_log_scale.
  std::vector<nn::Param*> parameters();
  std::vector<const nn::Param*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

  nn::Sequential g_a, g_s, h_a, h_s;
  nn::Param z_mean;       // per-channel prior mean of z
  nn::Param z_log_scale;  // per-channel prior log σ of z

 private:
  CodecConfig config_;
};

struct LatentTensors {
  nn::Tensor y, y_hat, z, z_hat;
};

// Conditional Gaussian parameters for y, already cropped to y's shape.
struct ConditionalParams {
  nn::Tensor mean, scale;
};

// Inference path. `x` is 3×H×W; any H, W ≥ 1 (edge-padded internally).
LatentTensors analyze(const CodecModel& model, const nn::Tensor& x);
ConditionalParams condition(const CodecModel& model, const nn::Tensor& z_hat, int y_h, int y_w);
nn::Tensor synthesize(const CodecModel& model, const nn::Tensor& y_hat, int height, int width);

// Latent bitstream: u64 model fingerprint, u16×3 y shape, u16×3 z shape, then
// one range-coded stream holding ẑ (per-channel prior) followed by ŷ
// (conditional tables).
std::vector<std::uint8_t> encode_latents(const CodecModel& model, const nn::Tensor& x);
LatentTensors decode_latents(const CodecModel& model, std::span<const std::uint8_t> bytes);
nn::Tensor learned_reconstruct(const CodecModel& model, std::span<const std::uint8_t> bytes,
                               int height, int width);

// Training-time description of one image.
struct TrainSample {
  nn::Tensor input;      // 3×H×W quantized-then-dequantized MWD planes
  RealPlane target;      // working depth / z_range, in [0, 1]
  MaskPlane mask;
  FringeParams fringe;   // z_offset must be 0
  int bits = 4;          // output snap depth
};

// How the non-differentiable steps are bridged during training.
enum class ProxyPolicy {
  Mixed,       // additive noise for rate terms, straight-through rounding for distortion
  NoiseOnly,   // additive noise everywhere (smooth almost everywhere, for gradient checks)
};

// Gradient of the decoded depth with respect to the blue channel.
enum class OrderGradient {
  // Fringe order held constant: depth depends on blue only through k, so
  // blue receives no gradient.
  Constant,
  // Straight-through on the coarse term of k = round(b·z_range/P − φ₀/2π):
  // d(depth)/db = z_range, while φ₀ inside the round stays constant.
  CoarseStraightThrough,
};

struct TrainOptions {
  LossWeights weights;
  ProxyPolicy proxy = ProxyPolicy::Mixed;
  OrderGradient order_gradient = OrderGradient::CoarseStraightThrough;
};

struct SampleResult {
  LossParts parts;
  double total = 0.0;
  // Hash of every discrete decision taken (fringe orders, confidence
  // selection, floors, phase branch). Equal signatures mean the loss is
  // locally smooth between two evaluations.
  std::uint64_t signature = 0;
};

// Loss for one sample; noise is drawn from `noise_seed`, so repeated calls agree.
SampleResult evaluate_sample(const CodecModel& model, const TrainSample& sample,
                             const TrainOptions& options, std::uint64_t noise_seed);
// As above, adding scale·d(total)/d(parameters) into Param::grad.
SampleResult accumulate_gradients(CodecModel& model, const TrainSample& sample,
                                  const TrainOptions& options, std::uint64_t noise_seed,
                                  double scale = 1.0);

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m, v;
};

struct StepStats {
  LossParts parts;  // batch means
  double total = 0.0;
  bool skipped = false;  // non-finite gradient; parameters untouched
};

// One optimizer step on the batch-mean loss. Never throws on non-finite
// gradients; those steps are skipped and reported.
StepStats train_step(CodecModel& model, std::span<const TrainSample> batch,
                     const TrainOptions& options, AdamState& optimizer, std::mt19937_64& rng);

// Builds a training sample from a depth map: prescale, encode, quantize at `bits`.
TrainSample make_train_sample(const DepthMap& depth, double period, int bits);

// Checkpoint: "DCKP", u32 version, u32×5 config (features, latent, hyper,
// hyper_features, window), u64 parameter count, then f64 values in
// declaration order. All little-endian.
std::vector<std::uint8_t> save_checkpoint(const CodecModel& model);
CodecModel load_checkpoint(std::span<const std::uint8_t> bytes);
std::uint64_t model_fingerprint(const CodecModel& model);

}  // namespace depthcodec
