// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/container.hpp"

#include <cmath>
#include <cstring>

#include "depthcodec/baseline_codec.hpp"
#include "depthcodec/byte_io.hpp"
#include "depthcodec/error.hpp"
#include "depthcodec/toy_codec.hpp"

namespace depthcodec {
namespace {

constexpr char kMagic[4] = {'D', 'T', 'C', 'M'};

nn::Tensor planes_to_tensor(const MwdImage& img) {
  nn::Tensor t(3, static_cast<int>(img.height()), static_cast<int>(img.width()));
  const RealPlane* planes[] = {&img.r, &img.g, &img.b};
  for (int c = 0; c < 3; ++c) std::copy(planes[c]->storage().begin(), planes[c]->storage().end(), t.channel(c));
  return t;
}

QuantizedMwd snap_tensor(const nn::Tensor& t, const std::array<std::uint8_t, 3>& bits) {
  QuantizedMwd q;
  SymbolPlane* planes[] = {&q.r, &q.g, &q.b};
  for (int c = 0; c < 3; ++c) {
    *planes[c] = SymbolPlane(static_cast<std::size_t>(t.w), static_cast<std::size_t>(t.h));
    for (std::size_t i = 0; i < t.plane(); ++i) (*planes[c])[i] = quantize_value(t.channel(c)[i], bits[c]);
  }
  q.bits_r = bits[0];
  q.bits_g = bits[1];
  q.bits_b = bits[2];
  return q;
}

void require_model(const CodecModel* model) {
  if (model == nullptr) throw Error(ErrorCode::InvalidArgument, "learned codec needs a model checkpoint");
}

}  // namespace

std::vector<std::uint8_t> serialize_header(const ContainerHeader& h) {
  if (h.sections.size() > 255) throw Error(ErrorCode::InvalidArgument, "too many sections");
  ByteWriter out;
  for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u8(h.version);
  out.u8(static_cast<std::uint8_t>(h.codec));
  for (std::uint8_t b : h.bits) out.u8(b);
  out.u8(h.flags);
  out.u32(h.width);
  out.u32(h.height);
  out.f64(h.z_offset);
  out.f64(h.z_range);
  out.f64(h.prescale);
  out.f64(h.period);
  out.u8(static_cast<std::uint8_t>(h.sections.size()));
  for (std::uint64_t len : h.sections) out.u64(len);
  return out.take();
}

ContainerHeader parse_header(std::span<const std::uint8_t> bytes, bool whole_container) {
  ByteReader in(bytes);
  const auto magic = in.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "not a depth container");
  ContainerHeader h;
  h.version = in.u8();
  if (h.version != kContainerVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "container version " + std::to_string(h.version));
  }
  const std::uint8_t codec = in.u8();
  if (codec > 1) throw Error(ErrorCode::InvalidArgument, "unknown codec id");
  h.codec = static_cast<CodecId>(codec);
  for (std::uint8_t& b : h.bits) b = in.u8();
  h.flags = in.u8();
  h.width = in.u32();
  h.height = in.u32();
  h.z_offset = in.f64();
  h.z_range = in.f64();
  h.prescale = in.f64();
  h.period = in.f64();
  h.sections.resize(in.u8());
  for (std::uint64_t& len : h.sections) len = in.u64();
  if (whole_container) {
    std::uint64_t total = 0;
    for (std::uint64_t len : h.sections) {
      if (len > in.remaining() || total > in.remaining() - len) {
        throw Error(ErrorCode::LengthMismatch, "sections exceed container size");
      }
      total += len;
    }
    if (total != in.remaining()) throw Error(ErrorCode::LengthMismatch, "trailing bytes after sections");
  }
  return h;
}

EncodeResult encode_file(const DepthMap& depth, const EncodeConfig& cfg) {
  for (int b : cfg.bits) check_bits(b);
  if (cfg.codec == CodecId::Learned) {
    require_model(cfg.model);
    if (cfg.adaptive) throw Error(ErrorCode::InvalidArgument, "adaptive quantization is baseline-only");
  }
  const int blue_bits = cfg.adaptive ? cfg.bit_lo : cfg.bits[2];
  const PrescaleResult pre = prescale_depth(depth, cfg.period, blue_bits);  // AllInvalid
  const MwdImage img = mwd_encode(pre.depth, pre.fringe, blue_bits);

  EncodeResult res;
  ContainerHeader& h = res.header;
  h.codec = cfg.codec;
  h.width = static_cast<std::uint32_t>(depth.values.width());
  h.height = static_cast<std::uint32_t>(depth.values.height());
  h.z_offset = pre.scale.offset;
  h.prescale = pre.scale.scale;
  h.z_range = pre.fringe.z_range;
  h.period = pre.fringe.period;
  res.mask = depth.valid;
  const bool has_mask = depth.valid_count() != depth.valid.size();

  std::vector<std::vector<std::uint8_t>> sections;
  if (has_mask) {
    h.flags |= kFlagMask;
    ByteWriter w;
    encode_mask_block(w, depth.valid);
    sections.push_back(w.take());
  }
  if (cfg.adaptive) {
    auto [q, map] = adaptive_quantize(img, cfg.patch, cfg.bit_lo, cfg.bit_hi);
    h.flags |= kFlagAdaptive;
    sections.push_back(serialize_quant_map(map));
    res.planes = std::move(q);
    sections.push_back(encode_planes_baseline(res.planes, nullptr));
  } else {
    const QuantizedMwd q = quantize_mwd(img, cfg.bits[0], cfg.bits[1], cfg.bits[2]);
    if (cfg.codec == CodecId::Baseline) {
      res.planes = q;
      sections.push_back(encode_planes_baseline(q, nullptr));
    } else {
      const nn::Tensor x = planes_to_tensor(dequantize_mwd(q, pre.fringe));
      sections.push_back(encode_latents(*cfg.model, x));
      // The decoder snaps the synthesis output; mirror it so callers know
      // exactly which planes come back.
      std::array<std::uint8_t, 3> bits{};
      for (int c = 0; c < 3; ++c) bits[c] = static_cast<std::uint8_t>(cfg.bits[c]);
      res.planes = snap_tensor(learned_reconstruct(*cfg.model, sections.back(), x.h, x.w), bits);
    }
  }
  h.bits = {static_cast<std::uint8_t>(res.planes.bits_r), static_cast<std::uint8_t>(res.planes.bits_g),
            static_cast<std::uint8_t>(res.planes.bits_b)};
  for (const auto& s : sections) h.sections.push_back(s.size());

  ByteWriter out;
  out.append(serialize_header(h));
  for (const auto& s : sections) out.append(s);
  res.bytes = out.take();
  return res;
}

DecodeResult decode_file(std::span<const std::uint8_t> bytes, const CodecModel* model) {
  DecodeResult res;
  res.header = parse_header(bytes, true);
  const ContainerHeader& h = res.header;
  const std::size_t w = h.width, hh = h.height;
  if (w == 0 || hh == 0) throw Error(ErrorCode::InvalidArgument, "empty image in container");
  const std::size_t expected = 1 + (h.adaptive() ? 1 : 0) + (h.has_mask() ? 1 : 0);
  if (h.sections.size() != expected) throw Error(ErrorCode::LengthMismatch, "unexpected section count");
  for (std::uint8_t b : h.bits) check_bits(b);

  std::size_t pos = h.encoded_size();
  std::size_t next = 0;
  auto section = [&]() {
    const auto s = bytes.subspan(pos, static_cast<std::size_t>(h.sections[next]));
    pos += s.size();
    ++next;
    return s;
  };

  res.mask = MaskPlane(w, hh, 1);
  if (h.has_mask()) {
    ByteReader r(section());
    res.mask = decode_mask_block(r, w, hh);
    if (r.remaining() != 0) throw Error(ErrorCode::LengthMismatch, "trailing bytes in mask section");
  }
  const FringeParams fringe{h.period, 0.0, h.z_range};
  MwdImage img;
  if (h.adaptive()) {
    if (h.codec != CodecId::Baseline) throw Error(ErrorCode::InvalidArgument, "adaptive map on learned codec");
    const AdaptiveQuantMap map = parse_quant_map(section(), w, hh);
    res.planes = decode_planes_baseline(section(), w, hh, false).planes;
    img = adaptive_dequantize(res.planes, map, fringe);
  } else if (h.codec == CodecId::Baseline) {
    res.planes = decode_planes_baseline(section(), w, hh, false).planes;
    if (res.planes.bits_r != h.bits[0] || res.planes.bits_g != h.bits[1] || res.planes.bits_b != h.bits[2]) {
      throw Error(ErrorCode::ModelMismatch, "plane bit depths disagree with header");
    }
    img = dequantize_mwd(res.planes, fringe);
  } else {
    require_model(model);
    const nn::Tensor x = learned_reconstruct(*model, section(), static_cast<int>(hh), static_cast<int>(w));
    res.planes = snap_tensor(x, h.bits);
    img = dequantize_mwd(res.planes, fringe);
  }

  res.depth = mwd_decode(img, ScaleRecord{h.z_offset, h.prescale});
  for (std::size_t i = 0; i < res.depth.values.size(); ++i) {
    if (res.mask[i] == 0) res.depth.values[i] = 0.0;
  }
  res.depth.valid = res.mask;
  res.depth.refresh_range();
  return res;
}

}  // namespace depthcodec
