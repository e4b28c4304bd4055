// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0
//
// depthcodec: encode, decode, evaluate and sweep depth maps; generate
// synthetic corpora; train the toy learned codec.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depthcodec/container.hpp"
#include "depthcodec/depth_io.hpp"
#include "depthcodec/error.hpp"
#include "depthcodec/metrics.hpp"
#include "depthcodec/sweep.hpp"
#include "depthcodec/synthetic.hpp"
#include "depthcodec/toy_codec.hpp"

namespace fs = std::filesystem;
using namespace depthcodec;

namespace {

struct Options {
  std::vector<std::string> inputs;
  std::string out;
  std::string codec = "baseline";
  int bits = 4;
  std::vector<int> bits_rgb;  // overrides --bits per channel
  double period = 8.0;
  double lambda = 0.05;
  int mask_sentinel = 0;
  bool no_sentinel = false;
  double depth_scale = 1.0;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string checkpoint;
  bool adaptive = false;
  int patch = 16;
  int bit_lo = 2;
  int bit_hi = 6;
  // sweep
  std::vector<int> bits_list{8, 5, 4, 3, 2};
  bool zero_timings = false;
  int synthetic = 0;  // sweep/train on a generated corpus instead of files
  // gen-synthetic / train
  int count = 16;
  int width = 128;
  int height = 128;
  double invalid_fraction = 0.0;
  int steps = 200;
  int batch = 4;
  double learning_rate = 1e-4;
};

IngestOptions ingest(const Options& o) {
  IngestOptions in;
  in.scale = o.depth_scale;
  in.use_sentinel = !o.no_sentinel;
  in.sentinel = o.mask_sentinel;
  return in;
}

std::unique_ptr<CodecModel> load_model(const Options& o) {
  if (o.checkpoint.empty()) return nullptr;
  return std::make_unique<CodecModel>(load_checkpoint(read_file(o.checkpoint)));
}

EncodeConfig encode_config(const Options& o, const CodecModel* model, int bits) {
  EncodeConfig c;
  c.codec = o.codec == "learned" ? CodecId::Learned : CodecId::Baseline;
  c.bits = {bits, bits, bits};
  if (o.bits_rgb.size() == 3 && bits == o.bits) c.bits = {o.bits_rgb[0], o.bits_rgb[1], o.bits_rgb[2]};
  c.period = o.period;
  c.adaptive = o.adaptive;
  c.patch = o.patch;
  c.bit_lo = o.bit_lo;
  c.bit_hi = o.bit_hi;
  c.model = model;
  if (c.codec == CodecId::Learned && model == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "--codec learned requires --checkpoint");
  }
  return c;
}

// Output path for input `index`: --out names the file for a single input and
// a directory otherwise.
fs::path output_for(const Options& o, std::size_t index, const std::string& ext) {
  const fs::path in = o.inputs[index];
  if (o.inputs.size() == 1 && !o.out.empty() && !fs::is_directory(o.out)) return o.out;
  const fs::path dir = o.out.empty() ? in.parent_path() : fs::path(o.out);
  return dir / (in.stem().string() + ext);
}

// Runs `work(i)` for every input with at most `jobs` threads. Failures are
// reported in input order; returns the number of failures.
template <class F>
int for_each_input(const Options& o, F work) {
  const int n = static_cast<int>(o.inputs.size());
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, o.jobs))
  for (int i = 0; i < n; ++i) {
    try {
      work(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    std::cerr << "error: " << o.inputs[i] << ": " << errors[i] << "\n";
    ++failures;
  }
  return failures;
}

int run_encode(const Options& o) {
  const auto model = load_model(o);
  const EncodeConfig config = encode_config(o, model.get(), o.bits);
  return for_each_input(o, [&](std::size_t i) {
    const DepthMap depth = read_depth(o.inputs[i], ingest(o));
    const EncodeResult r = encode_file(depth, config);
    write_file(output_for(o, i, ".dtcm"), r.bytes);
  }) == 0 ? 0 : 1;
}

int run_decode(const Options& o) {
  const auto model = load_model(o);
  return for_each_input(o, [&](std::size_t i) {
    const DecodeResult r = decode_file(read_file(o.inputs[i]), model.get());
    DepthMap depth = r.depth;
    depth.valid = r.mask;
    depth.refresh_range();
    write_depth(output_for(o, i, ".dtd"), depth, ingest(o));
  }) == 0 ? 0 : 1;
}

void print_csv_row(std::ostream& os, const std::string& name, const MetricsReport& m) {
  os << name << "," << format_metric(m.bpp) << "," << format_metric(m.psnr_db) << "," << format_metric(m.rmse)
     << "," << format_metric(m.nrmse) << "," << format_metric(m.accuracy_pct) << "," << format_metric(m.cr)
     << "," << m.coded_bits << "\n";
}

int run_eval(const Options& o) {
  const auto model = load_model(o);
  const EncodeConfig config = encode_config(o, model.get(), o.bits);
  std::vector<std::optional<MetricsReport>> reports(o.inputs.size());
  const int failures = for_each_input(o, [&](std::size_t i) {
    reports[i] = evaluate_round_trip(read_depth(o.inputs[i], ingest(o)), config, model.get()).metrics;
  });
  std::ostringstream csv;
  csv << "file,bpp,psnr_db,rmse,nrmse,accuracy_pct,cr,coded_bits\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i]) print_csv_row(csv, o.inputs[i], *reports[i]);
  }
  if (o.out.empty()) {
    std::cout << csv.str();
  } else if (failures == 0) {
    const std::string s = csv.str();
    write_file(o.out, {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }
  return failures == 0 ? 0 : 1;
}

SyntheticConfig synthetic_config(const Options& o) {
  SyntheticConfig c;
  c.width = o.width;
  c.height = o.height;
  c.invalid_fraction = o.invalid_fraction;
  return c;
}

std::vector<CorpusItem> load_corpus(const Options& o) {
  std::vector<CorpusItem> corpus;
  if (o.synthetic > 0) {
    const auto maps = generate_corpus(synthetic_config(o), o.synthetic, o.seed);
    for (std::size_t i = 0; i < maps.size(); ++i) corpus.push_back({"synthetic_" + std::to_string(i), maps[i], 0.0});
    return corpus;
  }
  for (const std::string& in : o.inputs) corpus.push_back({in, read_depth(in, ingest(o)), 0.0});
  return corpus;
}

int run_sweep(const Options& o) {
  const auto model = load_model(o);
  const std::vector<CorpusItem> corpus = load_corpus(o);
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs inputs or --synthetic N");
  std::vector<SweepSetting> settings;
  for (int b : o.bits_list) settings.push_back({o.codec + "_b" + std::to_string(b), encode_config(o, model.get(), b)});
  SweepOptions sweep_options;
  sweep_options.jobs = o.jobs;
  sweep_options.record_timing = !o.zero_timings;
  const std::string csv = sweep_csv(rd_sweep(corpus, settings, sweep_options));
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_file(o.out, {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
  }
  return 0;
}

int run_gen_synthetic(const Options& o) {
  if (o.count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be at least 1");
  const fs::path dir = o.out.empty() ? fs::path("synthetic") : fs::path(o.out);
  const auto maps = generate_corpus(synthetic_config(o), o.count, o.seed);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "synthetic_%04zu.dtd", i);
    write_dtd(dir / name, maps[i]);
  }
  std::cout << "wrote " << maps.size() << " maps to " << dir.string() << "\n";
  return 0;
}

int run_train(const Options& o) {
  if (o.out.empty()) throw Error(ErrorCode::InvalidArgument, "train requires --out <checkpoint>");
  std::unique_ptr<CodecModel> model = load_model(o);
  if (!model) {
    model = std::make_unique<CodecModel>();
    model->init(o.seed);
  }
  const std::vector<CorpusItem> corpus = load_corpus(o);
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "train needs inputs or --synthetic N");
  std::vector<TrainSample> samples;
  for (const CorpusItem& item : corpus) samples.push_back(make_train_sample(item.depth, o.period, o.bits));

  TrainOptions options;
  options.weights.lambda = o.lambda;
  options.weights.validate();
  AdamState adam;
  adam.learning_rate = o.learning_rate;
  std::mt19937_64 rng(o.seed);
  std::vector<std::size_t> order(samples.size());
  std::size_t cursor = order.size();
  double ema = 0.0;
  for (int step = 0; step < o.steps; ++step) {
    std::vector<TrainSample> batch;
    for (int j = 0; j < o.batch; ++j) {
      if (cursor == order.size()) {
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(samples[order[cursor++]]);
    }
    const StepStats s = train_step(*model, batch, options, adam, rng);
    if (!s.skipped) ema = step == 0 ? s.total : 0.9 * ema + 0.1 * s.total;
    if (step % 10 == 0 || step + 1 == o.steps) {
      std::printf("step %d total %.6f mse %.6f bpp %.6f ema %.6f%s\n", step, s.total, s.parts.mse, s.parts.bpp, ema,
                  s.skipped ? " (skipped)" : "");
    }
  }
  write_file(o.out, save_checkpoint(*model));
  return 0;
}

void add_codec_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--codec", o.codec, "Entropy coder")->check(CLI::IsMember({"baseline", "learned"}));
  cmd->add_option("--bits", o.bits, "Bits per channel")->check(CLI::Range(2, 8));
  cmd->add_option("--bits-rgb", o.bits_rgb, "Per-channel bits r g b")->expected(3)->check(CLI::Range(2, 8));
  cmd->add_option("--period", o.period, "Fringe period P")->check(CLI::PositiveNumber);
  cmd->add_option("--checkpoint", o.checkpoint, "Learned codec checkpoint");
  cmd->add_flag("--adaptive", o.adaptive, "Per-patch adaptive bit depths (baseline)");
  cmd->add_option("--patch", o.patch, "Adaptive patch size")->check(CLI::PositiveNumber);
  cmd->add_option("--bit-lo", o.bit_lo, "Adaptive lowest bit depth")->check(CLI::Range(2, 8));
  cmd->add_option("--bit-hi", o.bit_hi, "Adaptive highest bit depth")->check(CLI::Range(2, 8));
}

void add_ingest_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--mask-sentinel", o.mask_sentinel, "16-bit value marking invalid pixels")->check(CLI::Range(0, 65535));
  cmd->add_flag("--no-sentinel", o.no_sentinel, "Treat every 16-bit value as valid");
  cmd->add_option("--depth-scale", o.depth_scale, "Depth units per 16-bit step")->check(CLI::PositiveNumber);
}

void add_synthetic_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--width", o.width, "Synthetic width")->check(CLI::PositiveNumber);
  cmd->add_option("--height", o.height, "Synthetic height")->check(CLI::PositiveNumber);
  cmd->add_option("--invalid-fraction", o.invalid_fraction, "Fraction of invalid pixels")->check(CLI::Range(0.0, 0.99));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-map compression via multiwavelength encoding"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.option_defaults()->always_capture_default();
  Options o;
  app.add_option("--jobs", o.jobs, "Files processed concurrently")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--lambda", o.lambda, "Rate-distortion weight (training)")->check(CLI::NonNegativeNumber);

  auto* encode = app.add_subcommand("encode", "Depth map(s) to .dtcm containers");
  encode->add_option("inputs", o.inputs, "Depth files (.png .pgm .f32 .raw .dtd)")->required();
  encode->add_option("--out", o.out, "Output file, or directory for several inputs");
  add_codec_flags(encode, o);
  add_ingest_flags(encode, o);

  auto* decode = app.add_subcommand("decode", "Containers back to depth maps");
  decode->add_option("inputs", o.inputs, "Container files")->required();
  decode->add_option("--out", o.out, "Output file (format by extension) or directory");
  decode->add_option("--checkpoint", o.checkpoint, "Learned codec checkpoint");
  add_ingest_flags(decode, o);

  auto* eval = app.add_subcommand("eval", "Round-trip metrics per file as CSV");
  eval->add_option("inputs", o.inputs, "Depth files")->required();
  eval->add_option("--out", o.out, "CSV path (default stdout)");
  add_codec_flags(eval, o);
  add_ingest_flags(eval, o);

  auto* sweep = app.add_subcommand("sweep", "Rate-distortion sweep over bit depths");
  sweep->add_option("inputs", o.inputs, "Depth files");
  sweep->add_option("--out", o.out, "CSV path (default stdout)");
  sweep->add_option("--bits-list", o.bits_list, "Bit depths to sweep")->delimiter(',')->check(CLI::Range(2, 8));
  sweep->add_option("--synthetic", o.synthetic, "Use N generated maps instead of files");
  sweep->add_flag("--zero-timings", o.zero_timings, "Write 0 for timings (byte-stable CSV)");
  add_codec_flags(sweep, o);
  add_ingest_flags(sweep, o);
  add_synthetic_flags(sweep, o);

  auto* gen = app.add_subcommand("gen-synthetic", "Write a seed-deterministic synthetic corpus (.dtd)");
  gen->add_option("--count", o.count, "Number of maps");
  gen->add_option("--out", o.out, "Output directory");
  add_synthetic_flags(gen, o);

  auto* train = app.add_subcommand("train", "Train the learned codec and write a checkpoint");
  train->add_option("inputs", o.inputs, "Depth files");
  train->add_option("--out", o.out, "Checkpoint path")->required();
  train->add_option("--synthetic", o.synthetic, "Use N generated maps instead of files");
  train->add_option("--steps", o.steps, "Optimizer steps")->check(CLI::PositiveNumber);
  train->add_option("--batch", o.batch, "Batch size")->check(CLI::PositiveNumber);
  train->add_option("--lr", o.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  train->add_option("--bits", o.bits, "Transport bits per channel")->check(CLI::Range(2, 8));
  train->add_option("--period", o.period, "Fringe period P")->check(CLI::PositiveNumber);
  train->add_option("--checkpoint", o.checkpoint, "Resume from checkpoint");
  add_synthetic_flags(train, o);
  add_ingest_flags(train, o);

  CLI11_PARSE(app, argc, argv);

  // Echo the resolved config in --config syntax, limited to the active subcommand.
  const std::string active = app.get_subcommands().front()->get_name();
  std::cerr << "# resolved config\n";
  std::istringstream resolved(app.config_to_str(true, false));
  for (std::string line; std::getline(resolved, line);) {
    const auto dot = line.find('.'), eq = line.find('=');
    const bool global = dot == std::string::npos || dot > eq;
    if (!line.empty() && (global || line.rfind(active + ".", 0) == 0)) std::cerr << "# " << line << "\n";
  }

  try {
    if (*encode) return run_encode(o);
    if (*decode) return run_decode(o);
    if (*eval) return run_eval(o);
    if (*sweep) return run_sweep(o);
    if (*gen) return run_gen_synthetic(o);
    if (*train) return run_train(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
