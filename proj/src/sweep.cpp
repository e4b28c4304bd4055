// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <sstream>

#include "depthcodec/error.hpp"

namespace depthcodec {
namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

struct Sample {
  MetricsReport m;
  double enc_ms = 0.0, dec_ms = 0.0;
};

}  // namespace

RoundTrip evaluate_round_trip(const DepthMap& depth, const EncodeConfig& config,
                              const CodecModel* model, double original_bits) {
  RoundTrip rt;
  rt.encoded = encode_file(depth, config);
  rt.decoded = decode_file(rt.encoded.bytes, model != nullptr ? model : config.model);
  rt.metrics = compute_metrics(depth.values, rt.decoded.depth.values, depth.valid,
                               8ull * rt.encoded.bytes.size(), original_bits);
  return rt;
}

std::vector<RdPoint> rd_sweep(const std::vector<CorpusItem>& corpus,
                              const std::vector<SweepSetting>& settings, const SweepOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "sweep corpus is empty");
  std::vector<RdPoint> points;
  for (const SweepSetting& setting : settings) {
    std::vector<Sample> samples(corpus.size());
    std::vector<std::exception_ptr> failures(corpus.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, options.jobs))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        const CorpusItem& item = corpus[i];
        const auto t0 = std::chrono::steady_clock::now();
        const EncodeResult enc = encode_file(item.depth, setting.config);
        const double enc_ms = elapsed_ms(t0);
        const auto t1 = std::chrono::steady_clock::now();
        const DecodeResult dec = decode_file(enc.bytes, setting.config.model);
        const double dec_ms = elapsed_ms(t1);
        samples[i].m = compute_metrics(item.depth.values, dec.depth.values, item.depth.valid,
                                       8ull * enc.bytes.size(), item.original_bits);
        if (options.record_timing) {
          samples[i].enc_ms = enc_ms;
          samples[i].dec_ms = dec_ms;
        }
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!failures[i]) continue;
      try {
        std::rethrow_exception(failures[i]);
      } catch (const Error& e) {
        throw Error(e.code(), corpus[i].name + ": " + e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::IoError, corpus[i].name + ": " + e.what());
      }
    }

    // Fixed reduction order: image index.
    RdPoint p;
    p.setting = setting.label;
    const double inv = 1.0 / static_cast<double>(corpus.size());
    MetricsReport& m = p.mean;
    for (const Sample& s : samples) {
      m.rmse += s.m.rmse;
      m.nrmse += s.m.nrmse;
      m.psnr_db += s.m.psnr_db;
      m.bpp += s.m.bpp;
      m.cr += s.m.cr;
      m.coded_bits += s.m.coded_bits;
      m.pixel_count += s.m.pixel_count;
      m.valid_pixel_count += s.m.valid_pixel_count;
      m.zero_range = m.zero_range || s.m.zero_range;
      p.enc_ms += s.enc_ms;
      p.dec_ms += s.dec_ms;
    }
    for (double* v : {&m.rmse, &m.nrmse, &m.psnr_db, &m.bpp, &m.cr, &p.enc_ms, &p.dec_ms}) *v *= inv;
    // Derived from the mean NRMSE so the aggregate keeps the exact coupling.
    m.accuracy_pct = (1.0 - m.nrmse) * 100.0;
    points.push_back(std::move(p));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const RdPoint& a, const RdPoint& b) { return a.mean.bpp < b.mean.bpp; });
  return points;
}

std::string sweep_csv(const std::vector<RdPoint>& points) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  for (const RdPoint& p : points) {
    out << p.setting << ',' << format_metric(p.mean.bpp) << ',' << format_metric(p.mean.psnr_db) << ','
        << format_metric(p.mean.rmse) << ',' << format_metric(p.mean.nrmse) << ','
        << format_metric(p.mean.accuracy_pct) << ',' << format_metric(p.mean.cr) << ','
        << format_metric(p.enc_ms) << ',' << format_metric(p.dec_ms) << '\n';
  }
  return out.str();
}

}  // namespace depthcodec
