// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "depthcodec/image.hpp"

namespace depthcodec {

// Conversion between stored integers/floats and depth units.
struct IngestOptions {
  double scale = 1.0;        // depth = stored·scale (e.g. 1.0 for millimetre PNGs)
  bool use_sentinel = true;  // 16-bit inputs: `sentinel` marks invalid pixels
  int sentinel = 0;
};

// 16-bit integer rasters <-> depth. Writing rounds depth/scale to the nearest
// integer and stores the sentinel for invalid pixels.
DepthMap depth_from_u16(const Plane<std::uint16_t>& raw, const IngestOptions& options = {});
Plane<std::uint16_t> depth_to_u16(const DepthMap& depth, const IngestOptions& options = {});

Plane<std::uint16_t> read_png16(const std::filesystem::path& path);
void write_png16(const std::filesystem::path& path, const Plane<std::uint16_t>& plane);
Plane<std::uint16_t> read_pgm16(const std::filesystem::path& path);
void write_pgm16(const std::filesystem::path& path, const Plane<std::uint16_t>& plane);

// Raw float32 raster plus a 16-byte sidecar next to it (same stem, ".hdr"):
// u32 width, u32 height, f64 scale. Non-finite values are invalid.
DepthMap read_raw_f32(const std::filesystem::path& path);
void write_raw_f32(const std::filesystem::path& path, const DepthMap& depth, double scale = 1.0);
std::filesystem::path sidecar_path(const std::filesystem::path& raster);

// Native synthetic format ".dtd": "DTD1", u32 width, u32 height, f64 z_min,
// f64 z_max, then width·height float32 values with NaN for invalid pixels.
struct DtdInfo {
  std::uint32_t width = 0, height = 0;
  double z_min = 0.0, z_max = 0.0;
};
DtdInfo read_dtd_info(const std::filesystem::path& path);
DepthMap read_dtd(const std::filesystem::path& path);
void write_dtd(const std::filesystem::path& path, const DepthMap& depth);

// Dispatch on extension: .png, .pgm, .f32/.raw, .dtd. Throws IoError.
DepthMap read_depth(const std::filesystem::path& path, const IngestOptions& options = {});
void write_depth(const std::filesystem::path& path, const DepthMap& depth, const IngestOptions& options = {});

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace depthcodec
