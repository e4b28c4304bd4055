// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/baseline_codec.hpp"

#include <array>
#include <bit>
#include <string>

#include "depthcodec/error.hpp"
#include "depthcodec/range_coder.hpp"

namespace depthcodec {

namespace {

constexpr std::size_t kRunLengthClasses = 33;

std::uint32_t predict(const SymbolPlane& p, std::size_t x, std::size_t y) {
  if (x > 0) return p(x - 1, y);
  if (y > 0) return p(x, y - 1);
  return 0;
}

void check_count(std::uint32_t count, std::size_t width, std::size_t height) {
  if (count != width * height) {
    throw Error(ErrorCode::LengthMismatch, "plane holds " + std::to_string(count) +
                                               " symbols, expected " +
                                               std::to_string(width * height));
  }
}

}  // namespace

void encode_plane_block(ByteWriter& out, const SymbolPlane& plane, int bits) {
  check_bits(bits);
  const std::uint32_t mask = (1u << bits) - 1u;
  AdaptiveFrequencyModel model(std::size_t{1} << bits);
  RangeEncoder enc;
  for (std::size_t y = 0; y < plane.height(); ++y) {
    for (std::size_t x = 0; x < plane.width(); ++x) {
      const std::uint32_t v = plane(x, y);
      if (v > mask) throw Error(ErrorCode::SymbolOutOfRange, "plane symbol exceeds bit depth");
      model.encode(enc, (v - predict(plane, x, y)) & mask);
    }
  }
  out.u32(static_cast<std::uint32_t>(plane.size()));
  out.u8(static_cast<std::uint8_t>(bits));
  out.append(enc.finish());
}

SymbolPlane decode_plane_block(ByteReader& in, std::size_t width, std::size_t height,
                               int& bits) {
  check_count(in.u32(), width, height);
  bits = in.u8();
  check_bits(bits);
  const std::uint32_t mask = (1u << bits) - 1u;
  AdaptiveFrequencyModel model(std::size_t{1} << bits);
  RangeDecoder dec(in.rest());
  SymbolPlane plane(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const auto residual = static_cast<std::uint32_t>(model.decode(dec));
      plane(x, y) = static_cast<std::uint16_t>((residual + predict(plane, x, y)) & mask);
    }
  }
  in.take(dec.bytes_consumed());
  return plane;
}

void encode_mask_block(ByteWriter& out, const MaskPlane& mask) {
  std::vector<std::uint32_t> runs;
  const auto px = mask.pixels();
  const std::uint8_t first = px.empty() ? 0 : (px[0] ? 1 : 0);
  std::uint8_t current = first;
  std::uint32_t length = 0;
  for (std::uint8_t v : px) {
    const std::uint8_t bit = v ? 1 : 0;
    if (bit != current) {
      runs.push_back(length);
      current = bit;
      length = 0;
    }
    ++length;
  }
  if (length > 0) runs.push_back(length);

  // Each run: its bit length class under an adaptive model, then the bits
  // below the leading one.
  AdaptiveFrequencyModel classes(kRunLengthClasses);
  RangeEncoder enc;
  for (std::uint32_t run : runs) {
    const int width = std::bit_width(run);
    classes.encode(enc, static_cast<std::size_t>(width));
    std::uint32_t rest = run & ((width > 1 ? (1u << (width - 1)) : 1u) - 1u);
    for (int remaining = width - 1; remaining > 0;) {
      const int chunk = remaining > 16 ? 16 : remaining;
      remaining -= chunk;
      enc.encode_bits((rest >> remaining) & ((1u << chunk) - 1u), chunk);
    }
  }
  out.u32(static_cast<std::uint32_t>(runs.size()));
  out.u8(1);
  out.u8(first);
  out.append(enc.finish());
}

MaskPlane decode_mask_block(ByteReader& in, std::size_t width, std::size_t height) {
  const std::uint32_t run_count = in.u32();
  if (in.u8() != 1) throw Error(ErrorCode::ModelMismatch, "mask block must be binary");
  std::uint8_t current = in.u8();
  if (current > 1) throw Error(ErrorCode::ModelMismatch, "mask start value must be 0 or 1");
  AdaptiveFrequencyModel classes(kRunLengthClasses);
  RangeDecoder dec(in.rest());
  MaskPlane mask(width, height);
  std::size_t pos = 0;
  for (std::uint32_t i = 0; i < run_count; ++i) {
    const int width_bits = static_cast<int>(classes.decode(dec));
    if (width_bits == 0) throw Error(ErrorCode::ModelMismatch, "zero-length mask run");
    std::uint32_t run = 1;
    for (int remaining = width_bits - 1; remaining > 0;) {
      const int chunk = remaining > 16 ? 16 : remaining;
      remaining -= chunk;
      run = (run << chunk) | dec.decode_bits(chunk);
    }
    if (run > mask.size() - pos) throw Error(ErrorCode::LengthMismatch, "mask runs overflow plane");
    for (std::uint32_t j = 0; j < run; ++j) mask[pos++] = current;
    current ^= 1;
  }
  if (pos != mask.size()) throw Error(ErrorCode::LengthMismatch, "mask runs do not cover plane");
  in.take(dec.bytes_consumed());
  return mask;
}

std::vector<std::uint8_t> encode_planes_baseline(const QuantizedMwd& q, const MaskPlane* mask) {
  const std::array<const SymbolPlane*, 3> planes{&q.r, &q.g, &q.b};
  const std::array<int, 3> bits{q.bits_r, q.bits_g, q.bits_b};
  for (const SymbolPlane* p : planes) {
    if (!p->same_shape(q.r)) throw Error(ErrorCode::InvalidArgument, "plane shapes differ");
  }
  if (mask && !mask->same_shape(q.r)) {
    throw Error(ErrorCode::InvalidArgument, "mask shape differs from planes");
  }

  // Planes are coded independently and concatenated in fixed r, g, b order.
  std::array<std::vector<std::uint8_t>, 3> blocks;
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < 3; ++c) {
    ByteWriter w;
    encode_plane_block(w, *planes[static_cast<std::size_t>(c)], bits[static_cast<std::size_t>(c)]);
    blocks[static_cast<std::size_t>(c)] = w.take();
  }

  ByteWriter out;
  if (mask) encode_mask_block(out, *mask);
  for (const auto& b : blocks) out.append(b);
  return out.take();
}

BaselineDecoded decode_planes_baseline(std::span<const std::uint8_t> bytes, std::size_t width,
                                       std::size_t height, bool has_mask) {
  ByteReader in(bytes);
  BaselineDecoded out;
  if (has_mask) out.mask = decode_mask_block(in, width, height);
  out.planes.r = decode_plane_block(in, width, height, out.planes.bits_r);
  out.planes.g = decode_plane_block(in, width, height, out.planes.bits_g);
  out.planes.b = decode_plane_block(in, width, height, out.planes.bits_b);
  if (in.remaining() != 0) {
    throw Error(ErrorCode::LengthMismatch, "trailing bytes after baseline planes");
  }
  return out;
}

}  // namespace depthcodec
