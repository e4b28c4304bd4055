// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "depthcodec/image.hpp"
#include "depthcodec/mwd.hpp"

namespace depthcodec {

inline constexpr int kMinBits = 1;
inline constexpr int kMaxBits = 8;

struct QuantizedMwd {
  SymbolPlane r;
  SymbolPlane g;
  SymbolPlane b;
  int bits_r = 4;
  int bits_g = 4;
  int bits_b = 4;

  std::size_t width() const noexcept { return r.width(); }
  std::size_t height() const noexcept { return r.height(); }
  friend bool operator==(const QuantizedMwd&, const QuantizedMwd&) = default;
};

void check_bits(int bits);

// round(clamp(v, 0, 1) * (2^bits - 1)), ties away from zero.
std::uint16_t quantize_value(double v, int bits);
double dequantize_value(std::uint16_t q, int bits);
// dequantize(quantize(v)): the inference-time snap to the lattice.
double fake_quantize(double v, int bits);

SymbolPlane quantize_uniform(const RealPlane& plane, int bits);
RealPlane dequantize_uniform(const SymbolPlane& plane, int bits);

QuantizedMwd quantize_mwd(const MwdImage& image, int bits_r, int bits_g, int bits_b);
MwdImage dequantize_mwd(const QuantizedMwd& q, const FringeParams& params);

// Training-time stand-ins for the hard quantizer. Noise adds U[-step/2, step/2);
// Ste snaps to the lattice. Both have identity gradient, so backward is a copy.
enum class ProxyMode { Noise, Ste };

void quantize_train_proxy(std::span<const double> in, std::span<double> out, int bits,
                          ProxyMode mode, std::mt19937_64& rng);

// Patch-wise bit allocation used only for the fixed-vs-adaptive comparison.
struct AdaptiveQuantMap {
  std::uint16_t patch_size = 16;
  std::uint8_t bit_lo = 2;
  std::uint8_t bit_hi = 6;
  std::size_t patches_x = 0;
  std::size_t patches_y = 0;
  std::vector<std::uint8_t> bits;   // row-major, one entry per patch
  std::vector<double> complexity;   // encoder-side only; not serialized

  std::size_t patch_count() const noexcept { return patches_x * patches_y; }
  int code_width() const noexcept;  // ceil(log2(bit_hi - bit_lo + 1))
  int bits_at(std::size_t x, std::size_t y) const noexcept {
    return bits[(y / patch_size) * patches_x + x / patch_size];
  }
};

// Mean gradient magnitude of `plane` inside each patch (forward differences
// that stay inside the patch).
std::vector<double> patch_complexity(const RealPlane& plane, std::size_t patch,
                                     std::size_t& patches_x, std::size_t& patches_y);

// Symbols in each patch use that patch's bit depth; the returned QuantizedMwd
// reports bit_hi for every channel.
std::pair<QuantizedMwd, AdaptiveQuantMap> adaptive_quantize(const MwdImage& image, int patch,
                                                            int bit_lo, int bit_hi);
MwdImage adaptive_dequantize(const QuantizedMwd& q, const AdaptiveQuantMap& map,
                             const FringeParams& params);

// u16 patch size, u8 bit_lo, u8 bit_hi, then per-patch codes (bits - bit_lo)
// packed LSB-first at code_width() bits each, row-major, padded to a byte.
std::vector<std::uint8_t> serialize_quant_map(const AdaptiveQuantMap& map);
AdaptiveQuantMap parse_quant_map(std::span<const std::uint8_t> bytes, std::size_t width,
                                 std::size_t height);

namespace serial {
SymbolPlane quantize_uniform(const RealPlane& plane, int bits);
RealPlane dequantize_uniform(const SymbolPlane& plane, int bits);
}  // namespace serial

}  // namespace depthcodec
