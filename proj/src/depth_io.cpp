// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/depth_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "depthcodec/byte_io.hpp"
#include "depthcodec/error.hpp"

namespace depthcodec {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::IoError, path.string() + ": " + what);
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const fs::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) io_fail(path, std::strerror(errno));
  return f;
}

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) io_fail(path, "write failed");
}

DepthMap depth_from_u16(const Plane<std::uint16_t>& raw, const IngestOptions& opt) {
  RealPlane values(raw.width(), raw.height());
  MaskPlane valid(raw.width(), raw.height(), 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    values[i] = static_cast<double>(raw[i]) * opt.scale;
    if (opt.use_sentinel && raw[i] == opt.sentinel) {
      valid[i] = 0;
      values[i] = 0.0;
    }
  }
  return DepthMap::from_values(std::move(values), std::move(valid));
}

Plane<std::uint16_t> depth_to_u16(const DepthMap& depth, const IngestOptions& opt) {
  Plane<std::uint16_t> out(depth.values.width(), depth.values.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (depth.valid[i] == 0) {
      out[i] = static_cast<std::uint16_t>(opt.sentinel);
      continue;
    }
    const double v = std::round(depth.values[i] / opt.scale);
    out[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
  }
  return out;
}

Plane<std::uint16_t> read_png16(const fs::path& path) {
  File f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_fail(path, "libpng initialization failed");
  }
  // Everything with a destructor lives above setjmp so a libpng longjmp skips nothing.
  Plane<std::uint16_t> out;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_fail(path, "malformed PNG");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info), h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info), color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || (depth != 16 && depth != 8)) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_fail(path, "expected 8- or 16-bit grayscale PNG");
  }
  if (depth == 16) png_set_swap(png);  // host little-endian samples
  png_read_update_info(png, info);
  buffer.resize(static_cast<std::size_t>(png_get_rowbytes(png, info)) * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * png_get_rowbytes(png, info);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out = Plane<std::uint16_t>(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = depth == 16 ? static_cast<std::uint16_t>(buffer[2 * i] | (buffer[2 * i + 1] << 8)) : buffer[i];
  }
  return out;
}

void write_png16(const fs::path& path, const Plane<std::uint16_t>& plane) {
  File f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    io_fail(path, "libpng initialization failed");
  }
  std::vector<std::uint8_t> buffer(plane.size() * 2);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    buffer[2 * i] = static_cast<std::uint8_t>(plane[i] >> 8);  // PNG is big-endian
    buffer[2 * i + 1] = static_cast<std::uint8_t>(plane[i] & 0xFF);
  }
  std::vector<png_bytep> rows(plane.height());
  for (std::size_t y = 0; y < plane.height(); ++y) rows[y] = buffer.data() + y * plane.width() * 2;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    io_fail(path, "PNG write failed");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(plane.width()), static_cast<png_uint_32>(plane.height()), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Plane<std::uint16_t> read_pgm16(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  std::size_t pos = 0;
  auto token = [&]() {
    std::string t;
    while (pos < bytes.size()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        ++pos;
      } else {
        t.push_back(c);
        ++pos;
      }
    }
    return t;
  };
  if (token() != "P5") io_fail(path, "expected binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    io_fail(path, "malformed PGM header");
  }
  ++pos;  // single whitespace before the raster
  if (maxval == 0 || maxval > 65535) io_fail(path, "unsupported PGM maxval");
  const std::size_t sample = maxval > 255 ? 2 : 1;
  if (bytes.size() < pos + w * h * sample) io_fail(path, "truncated PGM raster");
  Plane<std::uint16_t> out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = sample == 2 ? static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1])
                         : bytes[pos + i];
  }
  return out;
}

void write_pgm16(const fs::path& path, const Plane<std::uint16_t>& plane) {
  std::string header = "P5\n" + std::to_string(plane.width()) + " " + std::to_string(plane.height()) + "\n65535\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (std::uint16_t v : plane.pixels()) {
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  write_file(path, bytes);
}

fs::path sidecar_path(const fs::path& raster) {
  fs::path p = raster;
  return p.replace_extension(".hdr");
}

DepthMap read_raw_f32(const fs::path& path) {
  const std::vector<std::uint8_t> hdr_bytes = read_file(sidecar_path(path));
  if (hdr_bytes.size() != 16) io_fail(sidecar_path(path), "sidecar must be 16 bytes");
  ByteReader hdr(hdr_bytes);
  const std::size_t w = hdr.u32(), h = hdr.u32();
  const double scale = hdr.f64();
  const std::vector<std::uint8_t> raster = read_file(path);
  if (raster.size() != w * h * 4) io_fail(path, "raster size disagrees with sidecar");
  ByteReader in(raster);
  RealPlane values(w, h);
  MaskPlane valid(w, h, 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = in.f32();
    if (std::isfinite(v)) {
      values[i] = static_cast<double>(v) * scale;
    } else {
      valid[i] = 0;
    }
  }
  return DepthMap::from_values(std::move(values), std::move(valid));
}

void write_raw_f32(const fs::path& path, const DepthMap& depth, double scale) {
  ByteWriter hdr;
  hdr.u32(static_cast<std::uint32_t>(depth.values.width()));
  hdr.u32(static_cast<std::uint32_t>(depth.values.height()));
  hdr.f64(scale);
  ByteWriter raster;
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    raster.f32(depth.valid[i] ? static_cast<float>(depth.values[i] / scale) : std::numeric_limits<float>::quiet_NaN());
  }
  write_file(sidecar_path(path), hdr.bytes());
  write_file(path, raster.bytes());
}

namespace {

DtdInfo parse_dtd_info(ByteReader& in, const fs::path& path) {
  const auto magic = in.take(4);
  if (std::memcmp(magic.data(), "DTD1", 4) != 0) io_fail(path, "not a .dtd depth file");
  DtdInfo info;
  info.width = in.u32();
  info.height = in.u32();
  info.z_min = in.f64();
  info.z_max = in.f64();
  return info;
}

}  // namespace

DtdInfo read_dtd_info(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  ByteReader in(bytes);
  try {
    return parse_dtd_info(in, path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    io_fail(path, "truncated header");
  }
}

DepthMap read_dtd(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  ByteReader in(bytes);
  try {
    const DtdInfo info = parse_dtd_info(in, path);
    if (in.remaining() != static_cast<std::size_t>(info.width) * info.height * 4) {
      io_fail(path, "raster size disagrees with header");
    }
    RealPlane values(info.width, info.height);
    MaskPlane valid(info.width, info.height, 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const float v = in.f32();
      if (std::isfinite(v)) {
        values[i] = v;
      } else {
        valid[i] = 0;
      }
    }
    return DepthMap::from_values(std::move(values), std::move(valid));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    io_fail(path, e.what());
  }
}

void write_dtd(const fs::path& path, const DepthMap& depth) {
  ByteWriter out;
  for (char c : {'D', 'T', 'D', '1'}) out.u8(static_cast<std::uint8_t>(c));
  out.u32(static_cast<std::uint32_t>(depth.values.width()));
  out.u32(static_cast<std::uint32_t>(depth.values.height()));
  // Range of the stored (float32) values, so the metadata is exact on reload.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    if (!depth.valid[i]) continue;
    const double v = static_cast<float>(depth.values[i]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) lo = hi = 0.0;
  out.f64(lo);
  out.f64(hi);
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    out.f32(depth.valid[i] ? static_cast<float>(depth.values[i]) : std::numeric_limits<float>::quiet_NaN());
  }
  write_file(path, out.bytes());
}

DepthMap read_depth(const fs::path& path, const IngestOptions& options) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return depth_from_u16(read_png16(path), options);
  if (ext == ".pgm") return depth_from_u16(read_pgm16(path), options);
  if (ext == ".f32" || ext == ".raw") return read_raw_f32(path);
  if (ext == ".dtd") return read_dtd(path);
  io_fail(path, "unknown depth format '" + ext + "'");
}

void write_depth(const fs::path& path, const DepthMap& depth, const IngestOptions& options) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png16(path, depth_to_u16(depth, options));
  if (ext == ".pgm") return write_pgm16(path, depth_to_u16(depth, options));
  if (ext == ".f32" || ext == ".raw") return write_raw_f32(path, depth, options.scale);
  if (ext == ".dtd") return write_dtd(path, depth);
  io_fail(path, "unknown depth format '" + ext + "'");
}

}  // namespace depthcodec
