// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/toy_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "depthcodec/byte_io.hpp"
#include "depthcodec/entropy_model.hpp"
#include "depthcodec/error.hpp"
#include "depthcodec/range_coder.hpp"
#include "mwd_pixel.hpp"

namespace depthcodec {

using nn::Conv2d;
using nn::ConvTranspose2d;
using nn::Gelu;
using nn::Param;
using nn::TcmBlock;
using nn::Tensor;

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr char kCheckpointMagic[4] = {'D', 'C', 'K', 'P'};

// FNV-1a, used both for decision signatures and model fingerprints.
struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  void word(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

double prior_scale(double log_scale) { return std::max(std::exp(log_scale), kScaleFloor); }

template <typename Seq>
void visit_params(Seq& model, auto&& fn) {
  for (auto* seq : {&model.g_a, &model.g_s, &model.h_a, &model.h_s}) {
    std::vector<Param*> ps;
    const_cast<nn::Sequential*>(seq)->collect(ps);
    for (Param* p : ps) fn(*p);
  }
  fn(const_cast<Param&>(model.z_mean));
  fn(const_cast<Param&>(model.z_log_scale));
}

Tensor round_latent(const Tensor& t) {
  Tensor out = t;
  for (double& v : out.v) v = latent_value(static_cast<std::uint32_t>(latent_symbol(v)));
  return out;
}

std::size_t checked_dim(std::size_t v) {
  if (v == 0 || v > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "tensor dimension out of range");
  return v;
}

}  // namespace

CodecModel::CodecModel(const CodecConfig& config) : config_(config) {
  const int n = config.features, cy = config.latent_channels, cz = config.hyper_channels;
  const int nh = config.hyper_features, win = config.window;
  if (n <= 0 || cy <= 0 || cz <= 0 || nh <= 0 || win <= 0) {
    throw Error(ErrorCode::InvalidArgument, "codec dimensions must be positive");
  }
  if (n % 2 != 0) throw Error(ErrorCode::OddChannels, "feature width must be even");

  g_a.add(Conv2d(3, n, 3, 2, 1));
  g_a.add(Gelu{});
  for (int stage = 0; stage < 3; ++stage) {
    g_a.add(TcmBlock(n, win));
    g_a.add(Conv2d(n, stage == 2 ? cy : n, 3, 2, 1));
    if (stage < 2) g_a.add(Gelu{});
  }

  g_s.add(ConvTranspose2d(cy, n, 4, 2, 1));
  g_s.add(Gelu{});
  for (int stage = 0; stage < 3; ++stage) {
    g_s.add(TcmBlock(n, win));
    g_s.add(ConvTranspose2d(n, stage == 2 ? 3 : n, 4, 2, 1));
    if (stage < 2) g_s.add(Gelu{});
  }

  h_a.add(Conv2d(cy, nh, 3, 1, 1));
  h_a.add(Gelu{});
  h_a.add(Conv2d(nh, nh, 3, 2, 1));
  h_a.add(Gelu{});
  h_a.add(Conv2d(nh, cz, 3, 2, 1));

  h_s.add(ConvTranspose2d(cz, nh, 4, 2, 1));
  h_s.add(Gelu{});
  h_s.add(ConvTranspose2d(nh, nh, 4, 2, 1));
  h_s.add(Gelu{});
  h_s.add(Conv2d(nh, 2 * cy, 3, 1, 1));

  z_mean.name = "z_mean";
  z_mean.resize(static_cast<std::size_t>(cz));
  z_log_scale.name = "z_log_scale";
  z_log_scale.resize(static_cast<std::size_t>(cz));
}

void CodecModel::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (nn::Sequential* seq : {&g_a, &g_s, &h_a, &h_s}) {
    for (nn::Layer& layer : seq->layers()) {
      std::visit(
          [&](auto& l) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(l)>, Gelu>) l.init(rng, 1.0);
          },
          layer);
    }
  }
  // Small output layers keep the first reconstructions near mid-grey and the
  // first conditional scales near softplus(0).
  auto& last_s = std::get<ConvTranspose2d>(g_s.layers().back());
  for (double& w : last_s.weight.value) w *= 0.1;
  std::fill(last_s.bias.value.begin(), last_s.bias.value.end(), 0.5);
  auto& last_h = std::get<Conv2d>(h_s.layers().back());
  for (double& w : last_h.weight.value) w *= 0.1;
  std::fill(last_h.bias.value.begin() + config_.latent_channels, last_h.bias.value.end(), 1.0);
  std::fill(z_mean.value.begin(), z_mean.value.end(), 0.0);
  std::fill(z_log_scale.value.begin(), z_log_scale.value.end(), 0.0);
}

std::vector<Param*> CodecModel::parameters() {
  std::vector<Param*> out;
  visit_params(*this, [&](Param& p) { out.push_back(&p); });
  return out;
}

std::vector<const Param*> CodecModel::parameters() const {
  std::vector<const Param*> out;
  visit_params(*this, [&](Param& p) { out.push_back(&p); });
  return out;
}

std::size_t CodecModel::parameter_count() const {
  std::size_t n = 0;
  for (const Param* p : parameters()) n += p->size();
  return n;
}

void CodecModel::zero_grad() {
  for (Param* p : parameters()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

LatentTensors analyze(const CodecModel& model, const Tensor& x) {
  if (x.c != 3) throw Error(ErrorCode::InvalidArgument, "analysis expects 3 channels");
  LatentTensors out;
  out.y = model.g_a.forward(nn::pad_to_multiple(x, kAnalysisStride));
  out.z = model.h_a.forward(out.y);
  out.y_hat = round_latent(out.y);
  out.z_hat = round_latent(out.z);
  return out;
}

ConditionalParams condition(const CodecModel& model, const Tensor& z_hat, int y_h, int y_w) {
  const int cy = model.config().latent_channels;
  const Tensor raw = nn::crop(model.h_s.forward(z_hat), y_h, y_w);
  ConditionalParams out;
  out.mean = nn::slice_channels(raw, 0, cy);
  out.scale = nn::slice_channels(raw, cy, 2 * cy);
  for (double& v : out.scale.v) v = scale_from_raw(v);
  return out;
}

Tensor synthesize(const CodecModel& model, const Tensor& y_hat, int height, int width) {
  return nn::crop(model.g_s.forward(y_hat), height, width);
}

namespace {

std::vector<CdfTable> conditional_tables(const ConditionalParams& cond) {
  std::vector<CdfTable> tables(cond.mean.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tables.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) tables[i] = latent_cdf(cond.mean.v[i], cond.scale.v[i]);
  return tables;
}

std::vector<CdfTable> prior_tables(const CodecModel& model) {
  std::vector<CdfTable> tables;
  for (std::size_t c = 0; c < model.z_mean.size(); ++c) {
    tables.push_back(latent_cdf(model.z_mean.value[c], prior_scale(model.z_log_scale.value[c])));
  }
  return tables;
}

}  // namespace

std::vector<std::uint8_t> encode_latents(const CodecModel& model, const Tensor& x) {
  const LatentTensors lat = analyze(model, x);
  const ConditionalParams cond = condition(model, lat.z_hat, lat.y.h, lat.y.w);
  ByteWriter out;
  out.u64(model_fingerprint(model));
  for (const Tensor* t : {&lat.y_hat, &lat.z_hat}) {
    out.u16(static_cast<std::uint16_t>(checked_dim(t->c)));
    out.u16(static_cast<std::uint16_t>(checked_dim(t->h)));
    out.u16(static_cast<std::uint16_t>(checked_dim(t->w)));
  }
  const std::vector<CdfTable> z_tables = prior_tables(model);
  const std::vector<CdfTable> y_tables = conditional_tables(cond);
  RangeEncoder enc;
  const std::size_t z_plane = lat.z_hat.plane();
  for (std::size_t i = 0; i < lat.z_hat.size(); ++i) {
    encode_symbol(enc, z_tables[i / z_plane], static_cast<std::size_t>(latent_symbol(lat.z_hat.v[i])));
  }
  for (std::size_t i = 0; i < lat.y_hat.size(); ++i) {
    encode_symbol(enc, y_tables[i], static_cast<std::size_t>(latent_symbol(lat.y_hat.v[i])));
  }
  out.append(enc.finish());
  return out.take();
}

LatentTensors decode_latents(const CodecModel& model, std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.u64() != model_fingerprint(model)) {
    throw Error(ErrorCode::ModelMismatch, "latent stream was produced by a different model");
  }
  int dims[6];
  for (int& d : dims) d = in.u16();
  const CodecConfig& cfg = model.config();
  if (dims[0] != cfg.latent_channels || dims[3] != cfg.hyper_channels ||
      dims[4] != (dims[1] + 3) / 4 || dims[5] != (dims[2] + 3) / 4) {
    throw Error(ErrorCode::LengthMismatch, "latent shapes inconsistent with model");
  }
  LatentTensors lat;
  lat.y_hat = Tensor(dims[0], dims[1], dims[2]);
  lat.z_hat = Tensor(dims[3], dims[4], dims[5]);

  const std::span<const std::uint8_t> payload = in.rest();
  RangeDecoder dec(payload);
  const std::vector<CdfTable> z_tables = prior_tables(model);
  const std::size_t z_plane = lat.z_hat.plane();
  for (std::size_t i = 0; i < lat.z_hat.size(); ++i) {
    lat.z_hat.v[i] = latent_value(static_cast<std::uint32_t>(decode_symbol(dec, z_tables[i / z_plane])));
  }
  const ConditionalParams cond = condition(model, lat.z_hat, lat.y_hat.h, lat.y_hat.w);
  const std::vector<CdfTable> y_tables = conditional_tables(cond);
  for (std::size_t i = 0; i < lat.y_hat.size(); ++i) {
    lat.y_hat.v[i] = latent_value(static_cast<std::uint32_t>(decode_symbol(dec, y_tables[i])));
  }
  if (dec.bytes_consumed() != payload.size()) {
    throw Error(ErrorCode::LengthMismatch, "trailing bytes after latent stream");
  }
  lat.y = lat.y_hat;
  lat.z = lat.z_hat;
  return lat;
}

Tensor learned_reconstruct(const CodecModel& model, std::span<const std::uint8_t> bytes,
                           int height, int width) {
  const LatentTensors lat = decode_latents(model, bytes);
  if (lat.y_hat.h * kAnalysisStride < height || lat.y_hat.w * kAnalysisStride < width ||
      (lat.y_hat.h - 1) * kAnalysisStride >= height || (lat.y_hat.w - 1) * kAnalysisStride >= width) {
    throw Error(ErrorCode::LengthMismatch, "latent shape does not match image size");
  }
  return synthesize(model, lat.y_hat, height, width);
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Trace {
  int height = 0, width = 0;
  std::vector<Tensor> ga_in, ha_in, hs_in, gs_in;
  Tensor y, z, z_rate, y_rate, hs_raw;  // hs_raw cropped to y's shape
  Tensor x_pre;                         // g_s output cropped to the image, before the snap
  Tensor x_snap;
  RealPlane depth;                      // decoded, normalized
  std::vector<std::uint8_t> clamp_pass; // STE gate of the output snap
  LossParts parts;
  double total = 0.0;
  std::uint64_t signature = 0;
};

// Per-element Gaussian parameters for the rate of y and z.
struct RateInputs {
  std::vector<double> y_mean, y_scale, y_raw, z_mean, z_scale;
};

RateInputs rate_inputs(const CodecModel& model, const Trace& t) {
  RateInputs r;
  const std::size_t half = static_cast<std::size_t>(model.config().latent_channels) * t.y.plane();
  r.y_mean.assign(t.hs_raw.v.begin(), t.hs_raw.v.begin() + static_cast<std::ptrdiff_t>(half));
  r.y_raw.assign(t.hs_raw.v.begin() + static_cast<std::ptrdiff_t>(half), t.hs_raw.v.end());
  for (double raw : r.y_raw) r.y_scale.push_back(scale_from_raw(raw));
  const std::size_t z_plane = t.z_rate.plane();
  for (std::size_t i = 0; i < t.z_rate.size(); ++i) {
    r.z_mean.push_back(model.z_mean.value[i / z_plane]);
    r.z_scale.push_back(prior_scale(model.z_log_scale.value[i / z_plane]));
  }
  return r;
}

Trace forward(const CodecModel& model, const TrainSample& s, const TrainOptions& opt,
              std::uint64_t noise_seed) {
  if (s.input.c != 3 || static_cast<std::size_t>(s.input.h) != s.target.height() ||
      static_cast<std::size_t>(s.input.w) != s.target.width()) {
    throw Error(ErrorCode::InvalidArgument, "training sample shapes differ");
  }
  opt.weights.validate();
  const bool mixed = opt.proxy == ProxyPolicy::Mixed;
  std::mt19937_64 rng(noise_seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  Fnv sig;

  Trace t;
  t.height = s.input.h;
  t.width = s.input.w;
  t.y = model.g_a.forward_train(nn::pad_to_multiple(s.input, kAnalysisStride), t.ga_in);
  t.z = model.h_a.forward_train(t.y, t.ha_in);

  t.z_rate = t.z;
  for (double& v : t.z_rate.v) v += unit(rng);
  Tensor z_syn = t.z_rate;
  if (mixed) {
    for (std::size_t i = 0; i < z_syn.size(); ++i) {
      z_syn.v[i] = std::round(t.z.v[i]);
      sig.word(std::bit_cast<std::uint64_t>(z_syn.v[i]));
    }
  }
  t.hs_raw = nn::crop(model.h_s.forward_train(z_syn, t.hs_in), t.y.h, t.y.w);

  t.y_rate = t.y;
  for (double& v : t.y_rate.v) v += unit(rng);
  Tensor y_syn = t.y_rate;
  if (mixed) {
    for (std::size_t i = 0; i < y_syn.size(); ++i) {
      y_syn.v[i] = std::round(t.y.v[i]);
      sig.word(std::bit_cast<std::uint64_t>(y_syn.v[i]));
    }
  }
  t.x_pre = nn::crop(model.g_s.forward_train(y_syn, t.gs_in), t.height, t.width);

  // Output snap to the transport bit depth.
  t.x_snap = t.x_pre;
  t.clamp_pass.assign(t.x_pre.size(), 1);
  const double step = 1.0 / static_cast<double>((1 << s.bits) - 1);
  for (std::size_t i = 0; i < t.x_snap.size(); ++i) {
    if (mixed) {
      const double v = t.x_pre.v[i];
      t.clamp_pass[i] = v >= 0.0 && v <= 1.0;
      t.x_snap.v[i] = fake_quantize(v, s.bits);
      sig.word(std::bit_cast<std::uint64_t>(t.x_snap.v[i]));
    } else {
      t.x_snap.v[i] += step * unit(rng);
    }
  }

  // MWD decode to normalized depth; the fringe order is a constant for gradients.
  const FringeParams& fp = s.fringe;
  t.depth = RealPlane(s.target.width(), s.target.height());
  for (int yy = 0; yy < t.height; ++yy) {
    for (int xx = 0; xx < t.width; ++xx) {
      const double r = t.x_snap.at(0, yy, xx), g = t.x_snap.at(1, yy, xx), b = t.x_snap.at(2, yy, xx);
      const double phi = detail::wrapped_phase_pixel(r, g);
      const std::int32_t k = detail::fringe_order_pixel(b, phi, fp);
      t.depth(xx, yy) = fp.period * (k + detail::phase_to_unit(phi)) / fp.z_range;
      sig.word(static_cast<std::uint64_t>(k) * 2 + (phi < 0.0));
    }
  }

  // Rate.
  const RateInputs rate = rate_inputs(model, t);
  const double pixels = static_cast<double>(t.height) * t.width;
  t.parts.bpp = loss_bpp(t.y_rate.v, rate.y_mean, rate.y_scale, pixels) +
                loss_bpp(t.z_rate.v, rate.z_mean, rate.z_scale, pixels);
  for (std::size_t i = 0; i < t.y_rate.size(); ++i) {
    const bool floored = gaussian_interval(t.y_rate.v[i], rate.y_mean[i], rate.y_scale[i]).floored;
    sig.byte(static_cast<std::uint8_t>(floored + 2 * (rate.y_scale[i] <= kScaleFloor)));
  }
  for (std::size_t i = 0; i < t.z_rate.size(); ++i) {
    sig.byte(static_cast<std::uint8_t>(gaussian_interval(t.z_rate.v[i], rate.z_mean[i], rate.z_scale[i]).floored));
  }

  // Distortion.
  t.parts.mse = loss_mse(t.depth, s.target, s.mask);
  t.parts.conf = loss_conf(t.depth, s.target, s.mask, opt.weights.tau);
  t.parts.tv = loss_tv(t.depth);
  double peak = 0.0;
  for (std::size_t i = 0; i < t.depth.size(); ++i) {
    if (s.mask[i] != 0) peak = std::max(peak, std::abs(t.depth[i] - s.target[i]));
  }
  for (std::size_t i = 0; i < t.depth.size(); ++i) {
    sig.byte(static_cast<std::uint8_t>(std::abs(t.depth[i] - s.target[i]) > opt.weights.tau * peak));
  }
  t.total = loss_total(t.parts, opt.weights);
  t.signature = sig.h;
  return t;
}

void backward(CodecModel& model, const TrainSample& s, const TrainOptions& opt, const Trace& t,
              double scale) {
  const LossWeights& w = opt.weights;
  RealPlane g_mse, g_conf, g_tv;
  loss_mse(t.depth, s.target, s.mask, &g_mse);
  loss_conf(t.depth, s.target, s.mask, w.tau, &g_conf);
  loss_tv(t.depth, &g_tv);
  const double mse_weight = w.lambda * 255.0 * 255.0;

  // d(depth)/d(r, g) through the wrapped phase.
  const FringeParams& fp = s.fringe;
  const double dz_dphi = fp.period / (detail::kTwoPi * fp.z_range);
  const bool coarse_st = opt.order_gradient == OrderGradient::CoarseStraightThrough;
  Tensor g_x(3, t.height, t.width);
  for (int yy = 0; yy < t.height; ++yy) {
    for (int xx = 0; xx < t.width; ++xx) {
      const double gz = scale * (mse_weight * g_mse(xx, yy) + g_conf(xx, yy) + w.tv_weight * g_tv(xx, yy));
      const double sn = 2.0 * t.x_snap.at(0, yy, xx) - 1.0;
      const double cs = 2.0 * t.x_snap.at(1, yy, xx) - 1.0;
      const double rr = sn * sn + cs * cs;
      if (coarse_st) g_x.at(2, yy, xx) = gz;  // normalized depth moves 1:1 with blue
      if (rr == 0.0) continue;
      g_x.at(0, yy, xx) = gz * dz_dphi * 2.0 * cs / rr;
      g_x.at(1, yy, xx) = -gz * dz_dphi * 2.0 * sn / rr;
    }
  }
  for (std::size_t i = 0; i < g_x.size(); ++i) {
    if (!t.clamp_pass[i]) g_x.v[i] = 0.0;
  }

  const int pad_h = t.y.h * kAnalysisStride, pad_w = t.y.w * kAnalysisStride;
  Tensor g_y = model.g_s.backward(t.gs_in, nn::uncrop(g_x, pad_h, pad_w));

  // Rate of y under the conditional model.
  const RateInputs rate = rate_inputs(model, t);
  const double pixels = static_cast<double>(t.height) * t.width;
  RateGradient gy_rate, gz_rate;
  loss_bpp(t.y_rate.v, rate.y_mean, rate.y_scale, pixels, &gy_rate);
  const int cy = model.config().latent_channels;
  const std::size_t half = static_cast<std::size_t>(cy) * t.y.plane();
  Tensor g_raw(2 * cy, t.y.h, t.y.w);
  for (std::size_t i = 0; i < half; ++i) {
    g_y.v[i] += scale * gy_rate.d_value[i];
    g_raw.v[i] = scale * gy_rate.d_mean[i];
    g_raw.v[i + half] = scale * gy_rate.d_scale[i] * scale_from_raw_derivative(rate.y_raw[i]);
  }
  const Tensor& hs_full = t.hs_in.front();  // ẑ proxy fed to h_s
  const int hs_h = hs_full.h * kHyperStride, hs_w = hs_full.w * kHyperStride;
  Tensor g_z = model.h_s.backward(t.hs_in, nn::uncrop(g_raw, hs_h, hs_w));

  // Rate of z under the factorized prior.
  loss_bpp(t.z_rate.v, rate.z_mean, rate.z_scale, pixels, &gz_rate);
  const std::size_t z_plane = t.z_rate.plane();
  for (std::size_t i = 0; i < t.z_rate.size(); ++i) {
    const std::size_t c = i / z_plane;
    g_z.v[i] += scale * gz_rate.d_value[i];
    model.z_mean.grad[c] += scale * gz_rate.d_mean[i];
    const double e = std::exp(model.z_log_scale.value[c]);
    if (e >= kScaleFloor) model.z_log_scale.grad[c] += scale * gz_rate.d_scale[i] * e;
  }

  const Tensor g_y_hyper = model.h_a.backward(t.ha_in, g_z);
  for (std::size_t i = 0; i < g_y.size(); ++i) g_y.v[i] += g_y_hyper.v[i];
  model.g_a.backward(t.ga_in, g_y);
}

bool gradients_finite(const CodecModel& model) {
  for (const Param* p : model.parameters()) {
    for (double g : p->grad) {
      if (!std::isfinite(g)) return false;
    }
  }
  return true;
}

}  // namespace

SampleResult evaluate_sample(const CodecModel& model, const TrainSample& sample,
                             const TrainOptions& options, std::uint64_t noise_seed) {
  const Trace t = forward(model, sample, options, noise_seed);
  return {t.parts, t.total, t.signature};
}

SampleResult accumulate_gradients(CodecModel& model, const TrainSample& sample,
                                  const TrainOptions& options, std::uint64_t noise_seed,
                                  double scale) {
  const Trace t = forward(model, sample, options, noise_seed);
  backward(model, sample, options, t, scale);
  return {t.parts, t.total, t.signature};
}

StepStats train_step(CodecModel& model, std::span<const TrainSample> batch,
                     const TrainOptions& options, AdamState& opt, std::mt19937_64& rng) {
  if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "empty batch");
  model.zero_grad();
  StepStats stats;
  const double inv = 1.0 / static_cast<double>(batch.size());
  bool finite = true;
  for (const TrainSample& s : batch) {
    const std::uint64_t seed = rng();
    SampleResult r;
    try {
      r = accumulate_gradients(model, s, options, seed, inv);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFinite) throw;
      finite = false;
      continue;
    }
    stats.parts.mse += r.parts.mse * inv;
    stats.parts.bpp += r.parts.bpp * inv;
    stats.parts.conf += r.parts.conf * inv;
    stats.parts.tv += r.parts.tv * inv;
    stats.total += r.total * inv;
  }
  if (!finite || !gradients_finite(model)) {
    stats.skipped = true;
    model.zero_grad();
    return stats;
  }

  std::vector<Param*> params = model.parameters();
  if (opt.m.size() != params.size()) {
    opt.m.assign(params.size(), {});
    opt.v.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i) {
      opt.m[i].assign(params[i]->size(), 0.0);
      opt.v[i].assign(params[i]->size(), 0.0);
    }
  }
  ++opt.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double g = p.grad[j];
      opt.m[i][j] = opt.beta1 * opt.m[i][j] + (1.0 - opt.beta1) * g;
      opt.v[i][j] = opt.beta2 * opt.v[i][j] + (1.0 - opt.beta2) * g * g;
      const double mh = opt.m[i][j] / c1;
      const double vh = opt.v[i][j] / c2;
      p.value[j] -= opt.learning_rate * mh / (std::sqrt(vh) + opt.epsilon);
    }
  }
  return stats;
}

TrainSample make_train_sample(const DepthMap& depth, double period, int bits) {
  const PrescaleResult pre = prescale_depth(depth, period, bits);
  const MwdImage img = mwd_encode(pre.depth, pre.fringe, bits);
  const MwdImage deq = dequantize_mwd(quantize_mwd(img, bits, bits, bits), pre.fringe);
  TrainSample s;
  const int w = static_cast<int>(img.width()), h = static_cast<int>(img.height());
  s.input = Tensor(3, h, w);
  const RealPlane* planes[] = {&deq.r, &deq.g, &deq.b};
  for (int c = 0; c < 3; ++c) {
    std::copy(planes[c]->storage().begin(), planes[c]->storage().end(), s.input.channel(c));
  }
  s.target = RealPlane(img.width(), img.height());
  for (std::size_t i = 0; i < s.target.size(); ++i) {
    s.target[i] = pre.depth.values[i] / pre.fringe.z_range;
  }
  s.mask = pre.depth.valid;
  s.fringe = pre.fringe;
  s.bits = bits;
  return s;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::vector<std::uint8_t> save_checkpoint(const CodecModel& model) {
  ByteWriter out;
  for (char c : kCheckpointMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u32(kCheckpointVersion);
  const CodecConfig& cfg = model.config();
  for (int v : {cfg.features, cfg.latent_channels, cfg.hyper_channels, cfg.hyper_features, cfg.window}) {
    out.u32(static_cast<std::uint32_t>(v));
  }
  out.u64(model.parameter_count());
  for (const Param* p : model.parameters()) {
    for (double v : p->value) out.f64(v);
  }
  return out.take();
}

CodecModel load_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.take(4);
  if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a model checkpoint");
  }
  if (in.u32() != kCheckpointVersion) throw Error(ErrorCode::UnsupportedVersion, "checkpoint version");
  CodecConfig cfg;
  for (int* v : {&cfg.features, &cfg.latent_channels, &cfg.hyper_channels, &cfg.hyper_features, &cfg.window}) {
    const std::uint32_t raw = in.u32();
    if (raw == 0 || raw > 4096) throw Error(ErrorCode::InvalidArgument, "checkpoint dimension out of range");
    *v = static_cast<int>(raw);
  }
  CodecModel model(cfg);
  if (in.u64() != model.parameter_count()) {
    throw Error(ErrorCode::LengthMismatch, "checkpoint parameter count");
  }
  for (Param* p : model.parameters()) {
    for (double& v : p->value) v = in.f64();
  }
  if (in.remaining() != 0) throw Error(ErrorCode::LengthMismatch, "trailing checkpoint bytes");
  return model;
}

std::uint64_t model_fingerprint(const CodecModel& model) {
  Fnv f;
  for (std::uint8_t b : save_checkpoint(model)) f.byte(b);
  return f.h;
}

}  // namespace depthcodec
