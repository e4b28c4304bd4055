// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

// Lossless reference coder for quantized MWD planes: left/top prediction,
// modular residuals, one adaptive order-0 model per plane.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "depthcodec/byte_io.hpp"
#include "depthcodec/image.hpp"
#include "depthcodec/quantizer.hpp"

namespace depthcodec {

// Plane block: u32 symbol count, u8 alphabet bits, range-coded payload.
void encode_plane_block(ByteWriter& out, const SymbolPlane& plane, int bits);
SymbolPlane decode_plane_block(ByteReader& in, std::size_t width, std::size_t height,
                               int& bits);

// Mask block: u32 run count, u8 alphabet bits (1), u8 value of the first run,
// range-coded run lengths.
void encode_mask_block(ByteWriter& out, const MaskPlane& mask);
MaskPlane decode_mask_block(ByteReader& in, std::size_t width, std::size_t height);

// Mask block first (when given), then planes r, g, b.
std::vector<std::uint8_t> encode_planes_baseline(const QuantizedMwd& q, const MaskPlane* mask);

struct BaselineDecoded {
  QuantizedMwd planes;
  std::optional<MaskPlane> mask;
};

BaselineDecoded decode_planes_baseline(std::span<const std::uint8_t> bytes, std::size_t width,
                                       std::size_t height, bool has_mask);

}  // namespace depthcodec
