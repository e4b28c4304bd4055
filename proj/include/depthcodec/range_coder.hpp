// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

// 32-bit range coder with 16-bit model precision.
//
// The encoder keeps a 33-bit `low` and propagates carries through a cached
// byte plus a run of pending 0xFF bytes. Interval bounds are computed as
// floor(range * cum / total) in 64-bit arithmetic, so the only coding loss is
// the final flush. The decoder consumes exactly the bytes the encoder wrote,
// which lets several streams sit back to back without length prefixes.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace depthcodec {

inline constexpr int kProbabilityBits = 16;
inline constexpr std::uint32_t kProbabilityTotal = 1u << kProbabilityBits;

// Cumulative frequency table. cum[s] .. cum[s+1] is symbol s's interval.
struct CdfTable {
  std::vector<std::uint32_t> cum;  // alphabet_size() + 1 entries, cum[0] == 0
  int precision_bits = kProbabilityBits;

  std::size_t alphabet_size() const noexcept { return cum.empty() ? 0 : cum.size() - 1; }
  std::uint32_t total() const noexcept { return cum.empty() ? 0 : cum.back(); }
  std::uint32_t freq(std::size_t s) const noexcept { return cum[s + 1] - cum[s]; }
  double probability(std::size_t s) const noexcept {
    return static_cast<double>(freq(s)) / static_cast<double>(total());
  }

  // True when cum is strictly increasing from 0 and total <= 2^precision_bits.
  bool valid() const noexcept;

  // Scales to a total of 2^16 with every symbol floored at one count (so no
  // symbol ever drops below 2^-16). Leftover counts go to the most probable
  // symbol. Non-finite or negative inputs count as zero.
  static CdfTable from_probabilities(std::span<const double> probabilities);
  static CdfTable uniform(std::size_t alphabet);
};

class RangeEncoder {
 public:
  // Throws ModelMismatch on zero frequency or total above 2^16.
  void encode(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total);
  // Codes `bits` (<= 16) raw bits with a flat distribution.
  void encode_bits(std::uint32_t value, int bits);
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  // Cumulative count c with cum[s] <= c < cum[s+1] for the coded symbol s.
  std::uint32_t target(std::uint32_t total) const;
  // Narrows to [cum_low, cum_low+freq); throws ModelMismatch if the code
  // value lies outside that interval.
  void consume(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total);
  std::uint32_t decode_bits(int bits);

  std::size_t bytes_consumed() const noexcept { return pos_; }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

// Order-0 model that adapts its counts after every symbol.
class AdaptiveFrequencyModel {
 public:
  explicit AdaptiveFrequencyModel(std::size_t alphabet, std::uint32_t increment = 32);

  void encode(RangeEncoder& enc, std::size_t symbol);
  std::size_t decode(RangeDecoder& dec);
  std::size_t alphabet_size() const noexcept { return freq_.size(); }

 private:
  void update(std::size_t symbol);

  std::vector<std::uint32_t> freq_;
  std::uint32_t total_ = 0;
  std::uint32_t increment_;
};

void encode_symbol(RangeEncoder& enc, const CdfTable& table, std::size_t symbol);
std::size_t decode_symbol(RangeDecoder& dec, const CdfTable& table);

// One static table for every position.
std::vector<std::uint8_t> range_encode(std::span<const std::uint32_t> symbols,
                                       const CdfTable& table);
std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        const CdfTable& table, std::size_t count);

// One table per position.
std::vector<std::uint8_t> range_encode(std::span<const std::uint32_t> symbols,
                                       std::span<const CdfTable> tables);
std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        std::span<const CdfTable> tables);

// Adaptive order-0 rule over `alphabet` symbols.
std::vector<std::uint8_t> range_encode_adaptive(std::span<const std::uint32_t> symbols,
                                                std::size_t alphabet);
std::vector<std::uint32_t> range_decode_adaptive(std::span<const std::uint8_t> bytes,
                                                 std::size_t alphabet, std::size_t count);

// sum(-log2 p) over both latent sets, divided by the original pixel count.
double estimate_bpp(std::span<const double> likelihoods_y, std::span<const double> likelihoods_z,
                    std::size_t pixel_count);

// Ideal code length in bits of `symbols` under `table`.
double cross_entropy_bits(std::span<const std::uint32_t> symbols, const CdfTable& table);

}  // namespace depthcodec
