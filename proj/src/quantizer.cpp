// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/quantizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "depthcodec/byte_io.hpp"
#include "depthcodec/error.hpp"

namespace depthcodec {

namespace {

double levels(int bits) { return static_cast<double>((1u << bits) - 1u); }

void check_symbols(const SymbolPlane& plane, int bits) {
  const unsigned top = (1u << bits) - 1u;
  for (std::uint16_t s : plane.pixels()) {
    if (s > top) {
      throw Error(ErrorCode::SymbolOutOfRange,
                  "symbol " + std::to_string(s) + " exceeds " + std::to_string(bits) + "-bit range");
    }
  }
}

}  // namespace

void check_bits(int bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw Error(ErrorCode::BitsOutOfRange, "bit depth " + std::to_string(bits) + " not in [1, 8]");
  }
}

std::uint16_t quantize_value(double v, int bits) {
  const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::round(c * levels(bits)));
}

double dequantize_value(std::uint16_t q, int bits) { return static_cast<double>(q) / levels(bits); }

double fake_quantize(double v, int bits) { return dequantize_value(quantize_value(v, bits), bits); }

SymbolPlane quantize_uniform(const RealPlane& plane, int bits) {
  check_bits(bits);
  SymbolPlane out(plane.width(), plane.height());
  const auto n = static_cast<std::ptrdiff_t>(plane.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = quantize_value(plane[i], bits);
  return out;
}

RealPlane dequantize_uniform(const SymbolPlane& plane, int bits) {
  check_bits(bits);
  check_symbols(plane, bits);
  RealPlane out(plane.width(), plane.height());
  const auto n = static_cast<std::ptrdiff_t>(plane.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = dequantize_value(plane[i], bits);
  return out;
}

QuantizedMwd quantize_mwd(const MwdImage& image, int bits_r, int bits_g, int bits_b) {
  QuantizedMwd q;
  q.r = quantize_uniform(image.r, bits_r);
  q.g = quantize_uniform(image.g, bits_g);
  q.b = quantize_uniform(image.b, bits_b);
  q.bits_r = bits_r;
  q.bits_g = bits_g;
  q.bits_b = bits_b;
  return q;
}

MwdImage dequantize_mwd(const QuantizedMwd& q, const FringeParams& params) {
  MwdImage out;
  out.r = dequantize_uniform(q.r, q.bits_r);
  out.g = dequantize_uniform(q.g, q.bits_g);
  out.b = dequantize_uniform(q.b, q.bits_b);
  out.params = params;
  return out;
}

void quantize_train_proxy(std::span<const double> in, std::span<double> out, int bits,
                          ProxyMode mode, std::mt19937_64& rng) {
  check_bits(bits);
  if (in.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "proxy size mismatch");
  if (mode == ProxyMode::Ste) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = fake_quantize(in[i], bits);
    return;
  }
  const double step = 1.0 / levels(bits);
  std::uniform_real_distribution<double> noise(-0.5 * step, 0.5 * step);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] + noise(rng);
}

int AdaptiveQuantMap::code_width() const noexcept {
  const unsigned span = static_cast<unsigned>(bit_hi - bit_lo) + 1u;
  return static_cast<int>(std::bit_width(span - 1u));
}

std::vector<double> patch_complexity(const RealPlane& plane, std::size_t patch,
                                     std::size_t& patches_x, std::size_t& patches_y) {
  patches_x = (plane.width() + patch - 1) / patch;
  patches_y = (plane.height() + patch - 1) / patch;
  std::vector<double> out(patches_x * patches_y, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(out.size());
  const std::size_t px_count = patches_x;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    const std::size_t x0 = (static_cast<std::size_t>(p) % px_count) * patch;
    const std::size_t y0 = (static_cast<std::size_t>(p) / px_count) * patch;
    const std::size_t x1 = std::min(x0 + patch, plane.width());
    const std::size_t y1 = std::min(y0 + patch, plane.height());
    double sum = 0.0;
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = x0; x < x1; ++x) {
        const double dx = x + 1 < x1 ? plane(x + 1, y) - plane(x, y) : 0.0;
        const double dy = y + 1 < y1 ? plane(x, y + 1) - plane(x, y) : 0.0;
        sum += std::sqrt(dx * dx + dy * dy);
      }
    }
    out[static_cast<std::size_t>(p)] = sum / static_cast<double>((x1 - x0) * (y1 - y0));
  }
  return out;
}

std::pair<QuantizedMwd, AdaptiveQuantMap> adaptive_quantize(const MwdImage& image, int patch,
                                                            int bit_lo, int bit_hi) {
  check_bits(bit_lo);
  check_bits(bit_hi);
  if (bit_lo > bit_hi) throw Error(ErrorCode::InvalidArgument, "bit_lo exceeds bit_hi");
  if (patch < 2 || patch > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "patch size out of range");

  AdaptiveQuantMap map;
  map.patch_size = static_cast<std::uint16_t>(patch);
  map.bit_lo = static_cast<std::uint8_t>(bit_lo);
  map.bit_hi = static_cast<std::uint8_t>(bit_hi);
  map.complexity = patch_complexity(image.b, static_cast<std::size_t>(patch), map.patches_x,
                                    map.patches_y);

  // Linear binning of each patch's rank quantile into [bit_lo, bit_hi].
  const std::size_t n = map.complexity.size();
  const int classes = bit_hi - bit_lo + 1;
  std::vector<double> sorted = map.complexity;
  std::sort(sorted.begin(), sorted.end());
  map.bits.assign(n, static_cast<std::uint8_t>(bit_lo));
  if (n > 1 && sorted.front() < sorted.back()) {
    for (std::size_t p = 0; p < n; ++p) {
      const auto below = static_cast<double>(
          std::lower_bound(sorted.begin(), sorted.end(), map.complexity[p]) - sorted.begin());
      const double quantile = below / static_cast<double>(n - 1);
      const int bin = std::min(classes - 1, static_cast<int>(std::floor(quantile * classes)));
      map.bits[p] = static_cast<std::uint8_t>(bit_lo + bin);
    }
  }

  QuantizedMwd q;
  q.r = SymbolPlane(image.width(), image.height());
  q.g = SymbolPlane(image.width(), image.height());
  q.b = SymbolPlane(image.width(), image.height());
  q.bits_r = q.bits_g = q.bits_b = bit_hi;
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const int bits = map.bits_at(x, y);
      q.r(x, y) = quantize_value(image.r(x, y), bits);
      q.g(x, y) = quantize_value(image.g(x, y), bits);
      q.b(x, y) = quantize_value(image.b(x, y), bits);
    }
  }
  return {std::move(q), std::move(map)};
}

MwdImage adaptive_dequantize(const QuantizedMwd& q, const AdaptiveQuantMap& map,
                             const FringeParams& params) {
  MwdImage out;
  out.r = RealPlane(q.width(), q.height());
  out.g = RealPlane(q.width(), q.height());
  out.b = RealPlane(q.width(), q.height());
  out.params = params;
  for (std::size_t y = 0; y < q.height(); ++y) {
    for (std::size_t x = 0; x < q.width(); ++x) {
      const int bits = map.bits_at(x, y);
      const unsigned top = (1u << bits) - 1u;
      if (q.r(x, y) > top || q.g(x, y) > top || q.b(x, y) > top) {
        throw Error(ErrorCode::SymbolOutOfRange, "symbol exceeds its patch bit depth");
      }
      out.r(x, y) = dequantize_value(q.r(x, y), bits);
      out.g(x, y) = dequantize_value(q.g(x, y), bits);
      out.b(x, y) = dequantize_value(q.b(x, y), bits);
    }
  }
  return out;
}

std::vector<std::uint8_t> serialize_quant_map(const AdaptiveQuantMap& map) {
  ByteWriter w;
  w.u16(map.patch_size);
  w.u8(map.bit_lo);
  w.u8(map.bit_hi);
  const int width = map.code_width();
  std::uint32_t acc = 0;
  int filled = 0;
  for (std::uint8_t b : map.bits) {
    acc |= static_cast<std::uint32_t>(b - map.bit_lo) << filled;
    filled += width;
    while (filled >= 8) {
      w.u8(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      filled -= 8;
    }
  }
  if (filled > 0) w.u8(static_cast<std::uint8_t>(acc));
  return w.take();
}

AdaptiveQuantMap parse_quant_map(std::span<const std::uint8_t> bytes, std::size_t width,
                                 std::size_t height) {
  ByteReader r(bytes);
  AdaptiveQuantMap map;
  map.patch_size = r.u16();
  map.bit_lo = r.u8();
  map.bit_hi = r.u8();
  if (map.patch_size < 2 || map.bit_lo < kMinBits || map.bit_hi > kMaxBits ||
      map.bit_lo > map.bit_hi) {
    throw Error(ErrorCode::InvalidArgument, "malformed adaptive quantization map");
  }
  map.patches_x = (width + map.patch_size - 1) / map.patch_size;
  map.patches_y = (height + map.patch_size - 1) / map.patch_size;
  const int code_width = map.code_width();
  const std::size_t n = map.patch_count();
  const std::size_t payload = (n * static_cast<std::size_t>(code_width) + 7) / 8;
  if (r.remaining() != payload) {
    throw Error(r.remaining() < payload ? ErrorCode::TruncatedStream : ErrorCode::LengthMismatch,
                "adaptive map payload size mismatch");
  }
  auto packed = r.take(payload);
  map.bits.resize(n);
  std::size_t bit = 0;
  for (std::size_t p = 0; p < n; ++p) {
    unsigned code = 0;
    for (int i = 0; i < code_width; ++i, ++bit) {
      code |= ((packed[bit / 8] >> (bit % 8)) & 1u) << i;
    }
    if (map.bit_lo + code > map.bit_hi) {
      throw Error(ErrorCode::SymbolOutOfRange, "patch bit code outside declared range");
    }
    map.bits[p] = static_cast<std::uint8_t>(map.bit_lo + code);
  }
  return map;
}

namespace serial {

SymbolPlane quantize_uniform(const RealPlane& plane, int bits) {
  check_bits(bits);
  SymbolPlane out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = quantize_value(plane[i], bits);
  return out;
}

RealPlane dequantize_uniform(const SymbolPlane& plane, int bits) {
  check_bits(bits);
  check_symbols(plane, bits);
  RealPlane out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = dequantize_value(plane[i], bits);
  return out;
}

}  // namespace serial

}  // namespace depthcodec
