// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "codec_gradcheck.hpp"
#include "depthcodec/entropy_model.hpp"
#include "depthcodec/error.hpp"
#include "depthcodec/synthetic.hpp"
#include "depthcodec/toy_codec.hpp"
#include "grad_oracle.hpp"

using namespace depthcodec;
using nn::Tensor;

namespace {

CodecModel small_model(std::uint64_t seed) {
  CodecConfig cfg;
  cfg.features = 8;
  cfg.latent_channels = 8;
  cfg.hyper_channels = 4;
  cfg.hyper_features = 8;
  CodecModel m(cfg);
  m.init(seed);
  return m;
}

TrainSample sample(int w, int h, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.width = w;
  cfg.height = h;
  cfg.edge_band_lo = 0.0;
  cfg.edge_band_hi = 1.0;
  return make_train_sample(generate_synthetic(cfg, seed), 8.0, 4);
}

void zero_biases(CodecModel& m) {
  for (nn::Param* p : m.parameters()) {
    if (p->name.rfind("b", 0) == 0) std::fill(p->value.begin(), p->value.end(), 0.0);
  }
}

}  // namespace

TEST(Analysis, LatentShapesFollowStrides) {
  CodecModel m;
  m.init(1);
  std::mt19937_64 rng(1);
  const LatentTensors lat = analyze(m, oracle::random_tensor(3, 64, 64, rng, 0.0, 1.0));
  EXPECT_EQ(lat.y.c, 32);
  EXPECT_EQ(lat.y.h, 4);
  EXPECT_EQ(lat.y.w, 4);
  EXPECT_EQ(lat.z.c, 16);
  EXPECT_EQ(lat.z.h, 1);
  EXPECT_EQ(lat.z.w, 1);
}

TEST(Analysis, ZeroInputWithZeroBiasesGivesZeroLatent) {
  CodecModel m = small_model(2);
  zero_biases(m);
  const LatentTensors lat = analyze(m, Tensor(3, 32, 32));
  for (double v : lat.y.v) EXPECT_EQ(v, 0.0);
}

TEST(Analysis, SamplesAreIndependent) {
  CodecModel m = small_model(3);
  std::mt19937_64 rng(3);
  const Tensor a = oracle::random_tensor(3, 32, 32, rng, 0.0, 1.0);
  const Tensor b = oracle::random_tensor(3, 32, 32, rng, 0.0, 1.0);
  const Tensor ya = analyze(m, a).y, yb = analyze(m, b).y;
  EXPECT_EQ(analyze(m, b).y, yb);
  EXPECT_EQ(analyze(m, a).y, ya);
}

TEST(Synthesis, ReconstructionShapeMatchesInput) {
  CodecModel m = small_model(4);
  std::mt19937_64 rng(4);
  for (auto [h, w] : {std::pair{16, 16}, {17, 5}, {40, 64}, {1, 1}, {63, 33}}) {
    const Tensor x = oracle::random_tensor(3, h, w, rng, 0.0, 1.0);
    const Tensor out = synthesize(m, analyze(m, x).y_hat, h, w);
    EXPECT_EQ(out.c, 3);
    EXPECT_EQ(out.h, h);
    EXPECT_EQ(out.w, w);
  }
}

TEST(HyperPath, ScalesAreFlooredAndLikelihoodsBounded) {
  CodecModel m = small_model(5);
  auto& last = std::get<nn::Conv2d>(m.h_s.layers().back());
  std::fill(last.bias.value.begin() + m.config().latent_channels, last.bias.value.end(), -1e3);
  std::mt19937_64 rng(5);
  const LatentTensors lat = analyze(m, oracle::random_tensor(3, 64, 48, rng, 0.0, 1.0));
  const ConditionalParams cond = condition(m, lat.z_hat, lat.y.h, lat.y.w);
  ASSERT_TRUE(cond.mean.same_shape(lat.y));
  EXPECT_GE(*std::min_element(cond.scale.v.begin(), cond.scale.v.end()), kScaleFloor);
  for (std::size_t i = 0; i < lat.y_hat.size(); ++i) {
    const double p = likelihood_y(lat.y_hat.v[i], cond.mean.v[i], cond.scale.v[i]);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(LatentStream, RoundTripIsExactAndDeterministic) {
  CodecModel m = small_model(6);
  std::mt19937_64 rng(6);
  const Tensor x = oracle::random_tensor(3, 48, 40, rng, 0.0, 1.0);
  const auto bytes = encode_latents(m, x);
  EXPECT_EQ(bytes, encode_latents(m, x));
  const LatentTensors ref = analyze(m, x);
  const LatentTensors got = decode_latents(m, bytes);
  EXPECT_EQ(got.y_hat, ref.y_hat);
  EXPECT_EQ(got.z_hat, ref.z_hat);
  EXPECT_EQ(learned_reconstruct(m, bytes, 48, 40), synthesize(m, ref.y_hat, 48, 40));
}

TEST(LatentStream, RejectsOtherModelsAndDamage) {
  CodecModel m = small_model(7);
  std::mt19937_64 rng(7);
  auto bytes = encode_latents(m, oracle::random_tensor(3, 32, 32, rng, 0.0, 1.0));
  try {
    decode_latents(small_model(8), bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelMismatch);
  }
  bytes.resize(14);
  EXPECT_THROW(decode_latents(m, bytes), Error);
}

TEST(Checkpoint, RoundTripsByteIdentically) {
  CodecModel m = small_model(9);
  const auto bytes = save_checkpoint(m);
  const CodecModel back = load_checkpoint(bytes);
  EXPECT_EQ(back.config(), m.config());
  EXPECT_EQ(save_checkpoint(back), bytes);
  EXPECT_EQ(model_fingerprint(back), model_fingerprint(m));
  EXPECT_EQ(bytes.size(), 4 + 4 + 20 + 8 + 8 * m.parameter_count());
}

TEST(Checkpoint, RejectsBadHeaders) {
  const auto good = save_checkpoint(small_model(10));
  auto bad = good;
  bad[0] = 'X';
  try {
    load_checkpoint(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadMagic);
  }
  bad = good;
  bad[4] = 9;
  try {
    load_checkpoint(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedVersion);
  }
  bad.assign(good.begin(), good.end() - 3);
  try {
    load_checkpoint(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncatedStream);
  }
}

TEST(TrainStep, ZeroLearningRateLeavesParametersUnchanged) {
  CodecModel m = small_model(11);
  const auto before = save_checkpoint(m);
  const std::vector<TrainSample> batch = {sample(32, 32, 1), sample(32, 32, 2)};
  AdamState opt;
  opt.learning_rate = 0.0;
  std::mt19937_64 rng(1);
  const StepStats s = train_step(m, batch, TrainOptions{}, opt, rng);
  EXPECT_EQ(save_checkpoint(m), before);
  EXPECT_FALSE(s.skipped);
  EXPECT_GT(s.total, 0.0);
  EXPECT_GT(s.parts.mse, 0.0);
  EXPECT_GT(s.parts.bpp, 0.0);
  EXPECT_GE(s.parts.tv, 0.0);
  // Batch mean of totals versus total of batch means: equal up to rounding.
  EXPECT_NEAR(s.total, loss_total(s.parts, LossWeights{}), 1e-12 * s.total);
}

TEST(TrainStep, NonFiniteStepIsSkippedAndReported) {
  CodecModel m = small_model(12);
  const auto before = save_checkpoint(m);
  std::vector<TrainSample> batch = {sample(16, 16, 3)};
  batch[0].input.v[5] = NAN;
  AdamState opt;
  std::mt19937_64 rng(2);
  const StepStats s = train_step(m, batch, TrainOptions{}, opt, rng);
  EXPECT_TRUE(s.skipped);
  EXPECT_EQ(save_checkpoint(m), before);
}

TEST(TrainStep, IsSeedDeterministic) {
  const std::vector<TrainSample> batch = {sample(32, 32, 4)};
  std::vector<std::uint8_t> results[2];
  for (auto& r : results) {
    CodecModel m = small_model(13);
    AdamState opt;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 3; ++i) train_step(m, batch, TrainOptions{}, opt, rng);
    r = save_checkpoint(m);
  }
  EXPECT_EQ(results[0], results[1]);
}

TEST(Gradients, FullCodecMatchesFiniteDifferences) {
  CodecModel m;
  m.init(14);
  TrainOptions opt;
  opt.proxy = ProxyPolicy::NoiseOnly;
  opt.order_gradient = OrderGradient::Constant;
  const auto r = oracle::check_codec_gradient(m, sample(8, 8, 5), opt, 100, 21);
  EXPECT_EQ(r.checked, 100);
  EXPECT_LE(r.worst, 1e-3);
}

TEST(Gradients, CoarseSurrogateOnlyAddsBlueGradient) {
  // With the surrogate on, parameter gradients differ from the exact ones;
  // the first synthesis layer sees the blue term, the analysis side too.
  CodecModel exact = small_model(15), surrogate = small_model(15);
  const TrainSample s = sample(32, 32, 6);
  TrainOptions a, b;
  a.order_gradient = OrderGradient::Constant;
  b.order_gradient = OrderGradient::CoarseStraightThrough;
  exact.zero_grad();
  surrogate.zero_grad();
  const auto ra = accumulate_gradients(exact, s, a, 1);
  const auto rb = accumulate_gradients(surrogate, s, b, 1);
  EXPECT_EQ(ra.total, rb.total);
  auto& la = std::get<nn::ConvTranspose2d>(exact.g_s.layers().back());
  auto& lb = std::get<nn::ConvTranspose2d>(surrogate.g_s.layers().back());
  EXPECT_EQ(la.bias.grad[0], lb.bias.grad[0]);
  EXPECT_EQ(la.bias.grad[1], lb.bias.grad[1]);
  EXPECT_EQ(la.bias.grad[2], 0.0);
  EXPECT_NE(lb.bias.grad[2], 0.0);
}
