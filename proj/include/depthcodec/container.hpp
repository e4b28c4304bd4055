// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "depthcodec/image.hpp"
#include "depthcodec/mwd.hpp"
#include "depthcodec/quantizer.hpp"

namespace depthcodec {

class CodecModel;

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kHeaderFixedSize = 51;  // up to and including section_count

enum class CodecId : std::uint8_t { Baseline = 0, Learned = 1 };

inline constexpr std::uint8_t kFlagMask = 0x01;
inline constexpr std::uint8_t kFlagAdaptive = 0x02;

// Byte layout, little-endian:
//   0  "DTCM"          4  version u8      5  codec_id u8     6  bits u8×3 (r, g, b)
//   9  flags u8       10  width u32      14  height u32
//  18  z_offset f64   26  z_range f64    34  prescale f64    42  P f64
//  50  section_count u8, then section_count × u64 lengths, then the sections.
struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  CodecId codec = CodecId::Baseline;
  std::array<std::uint8_t, 3> bits{4, 4, 4};
  std::uint8_t flags = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double z_offset = 0.0;  // depth subtracted before prescaling
  double z_range = 16.0;  // working span after prescaling
  double prescale = 1.0;  // working = (depth - z_offset)·prescale
  double period = 8.0;
  std::vector<std::uint64_t> sections;

  bool has_mask() const noexcept { return (flags & kFlagMask) != 0; }
  bool adaptive() const noexcept { return (flags & kFlagAdaptive) != 0; }
  std::size_t encoded_size() const noexcept { return kHeaderFixedSize + 8 * sections.size(); }

  friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

std::vector<std::uint8_t> serialize_header(const ContainerHeader& header);
// Parses the header at the front of `bytes`. Throws TruncatedStream, BadMagic,
// UnsupportedVersion. With `whole_container`, also requires the declared
// section lengths to cover the remaining bytes exactly (LengthMismatch).
ContainerHeader parse_header(std::span<const std::uint8_t> bytes, bool whole_container = true);

struct EncodeConfig {
  CodecId codec = CodecId::Baseline;
  std::array<int, 3> bits{4, 4, 4};
  double period = 8.0;
  bool adaptive = false;  // baseline only; per-patch bit depths in [bit_lo, bit_hi]
  int patch = 16;
  int bit_lo = 2;
  int bit_hi = 6;
  const CodecModel* model = nullptr;  // required for CodecId::Learned
};

struct EncodeResult {
  std::vector<std::uint8_t> bytes;
  ContainerHeader header;
  QuantizedMwd planes;  // exactly what decode_file will reproduce
  MaskPlane mask;
};

struct DecodeResult {
  ContainerHeader header;
  QuantizedMwd planes;
  MaskPlane mask;   // all ones when the container carries no mask
  DepthMap depth;   // invalid pixels hold 0
};

// Sections, in order: mask run-lengths (if flagged), adaptive patch map (if
// flagged), coded planes (baseline) or latent stream (learned).
EncodeResult encode_file(const DepthMap& depth, const EncodeConfig& config);
DecodeResult decode_file(std::span<const std::uint8_t> bytes, const CodecModel* model = nullptr);

}  // namespace depthcodec
