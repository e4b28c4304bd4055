// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/range_coder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depthcodec/error.hpp"

namespace depthcodec {

namespace {

constexpr std::uint32_t kTop = 1u << 24;

void check_interval(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total) {
  if (freq == 0 || total == 0 || total > kProbabilityTotal ||
      static_cast<std::uint64_t>(cum_low) + freq > total) {
    throw Error(ErrorCode::ModelMismatch, "symbol interval [" + std::to_string(cum_low) + ", +" +
                                              std::to_string(freq) + ") invalid for total " +
                                              std::to_string(total));
  }
}

}  // namespace

bool CdfTable::valid() const noexcept {
  if (cum.size() < 2 || cum.front() != 0) return false;
  if (total() > (1u << precision_bits)) return false;
  for (std::size_t i = 1; i < cum.size(); ++i) {
    if (cum[i] <= cum[i - 1]) return false;
  }
  return true;
}

CdfTable CdfTable::from_probabilities(std::span<const double> probabilities) {
  const std::size_t n = probabilities.size();
  if (n == 0 || n > kProbabilityTotal) {
    throw Error(ErrorCode::InvalidArgument, "alphabet size must be in [1, 65536]");
  }
  double mass = 0.0;
  for (double p : probabilities) mass += std::isfinite(p) && p > 0.0 ? p : 0.0;

  std::vector<std::uint32_t> freq(n, 1);
  const double spare = static_cast<double>(kProbabilityTotal - n);
  std::uint64_t used = n;
  if (mass > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = probabilities[i];
      if (!(std::isfinite(p) && p > 0.0)) continue;
      const auto extra = static_cast<std::uint32_t>(std::floor(p / mass * spare));
      freq[i] += extra;
      used += extra;
    }
  }
  const std::size_t peak = mass > 0.0
      ? static_cast<std::size_t>(std::max_element(freq.begin(), freq.end()) - freq.begin())
      : 0;
  freq[peak] += static_cast<std::uint32_t>(kProbabilityTotal - used);

  CdfTable table;
  table.cum.resize(n + 1);
  table.cum[0] = 0;
  for (std::size_t i = 0; i < n; ++i) table.cum[i + 1] = table.cum[i] + freq[i];
  return table;
}

CdfTable CdfTable::uniform(std::size_t alphabet) {
  std::vector<double> p(alphabet, 1.0);
  return from_probabilities(p);
}

void RangeEncoder::encode(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total) {
  check_interval(cum_low, freq, total);
  const std::uint64_t r = range_;
  const std::uint64_t lo = r * cum_low / total;
  const std::uint64_t hi = r * (cum_low + freq) / total;
  low_ += lo;
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_bits(std::uint32_t value, int bits) {
  encode(value, 1, 1u << bits);
}

void RangeEncoder::shift_low() {
  if (low_ < 0xFF000000u || low_ > 0xFFFFFFFFu) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t pending = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(pending + carry));
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= bytes_.size()) throw Error(ErrorCode::TruncatedStream, "range coder ran past input");
  return bytes_[pos_++];
}

std::uint32_t RangeDecoder::target(std::uint32_t total) const {
  if (total == 0 || total > kProbabilityTotal) {
    throw Error(ErrorCode::ModelMismatch, "model total out of range");
  }
  const std::uint64_t c = ((static_cast<std::uint64_t>(code_) + 1) * total - 1) / range_;
  // A code value outside [0, range) can only come from a foreign stream.
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(c, total - 1));
}

void RangeDecoder::consume(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total) {
  check_interval(cum_low, freq, total);
  const std::uint64_t r = range_;
  const std::uint64_t lo = r * cum_low / total;
  const std::uint64_t hi = r * (cum_low + freq) / total;
  if (code_ < lo || code_ >= hi) {
    throw Error(ErrorCode::ModelMismatch, "code value outside decoded symbol interval");
  }
  code_ -= static_cast<std::uint32_t>(lo);
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

std::uint32_t RangeDecoder::decode_bits(int bits) {
  const std::uint32_t total = 1u << bits;
  const std::uint32_t v = target(total);
  consume(v, 1, total);
  return v;
}

AdaptiveFrequencyModel::AdaptiveFrequencyModel(std::size_t alphabet, std::uint32_t increment)
    : freq_(alphabet, 1), total_(static_cast<std::uint32_t>(alphabet)), increment_(increment) {
  if (alphabet == 0 || alphabet > kProbabilityTotal / 2) {
    throw Error(ErrorCode::InvalidArgument, "adaptive alphabet size out of range");
  }
}

void AdaptiveFrequencyModel::update(std::size_t symbol) {
  freq_[symbol] += increment_;
  total_ += increment_;
  if (total_ > kProbabilityTotal) {
    total_ = 0;
    for (auto& f : freq_) {
      f = (f + 1) / 2;
      total_ += f;
    }
  }
}

void AdaptiveFrequencyModel::encode(RangeEncoder& enc, std::size_t symbol) {
  if (symbol >= freq_.size()) {
    throw Error(ErrorCode::ModelMismatch, "symbol " + std::to_string(symbol) + " outside alphabet");
  }
  std::uint32_t cum = 0;
  for (std::size_t s = 0; s < symbol; ++s) cum += freq_[s];
  enc.encode(cum, freq_[symbol], total_);
  update(symbol);
}

std::size_t AdaptiveFrequencyModel::decode(RangeDecoder& dec) {
  const std::uint32_t t = dec.target(total_);
  std::uint32_t cum = 0;
  std::size_t s = 0;
  while (cum + freq_[s] <= t) cum += freq_[s++];
  dec.consume(cum, freq_[s], total_);
  update(s);
  return s;
}

void encode_symbol(RangeEncoder& enc, const CdfTable& table, std::size_t symbol) {
  if (symbol >= table.alphabet_size()) {
    throw Error(ErrorCode::ModelMismatch, "symbol " + std::to_string(symbol) + " outside alphabet");
  }
  enc.encode(table.cum[symbol], table.freq(symbol), table.total());
}

std::size_t decode_symbol(RangeDecoder& dec, const CdfTable& table) {
  if (table.alphabet_size() == 0) throw Error(ErrorCode::ModelMismatch, "empty model");
  const std::uint32_t t = dec.target(table.total());
  const auto it = std::upper_bound(table.cum.begin() + 1, table.cum.end(), t);
  if (it == table.cum.end()) throw Error(ErrorCode::ModelMismatch, "target beyond model total");
  const auto s = static_cast<std::size_t>(it - table.cum.begin()) - 1;
  dec.consume(table.cum[s], table.freq(s), table.total());
  return s;
}

std::vector<std::uint8_t> range_encode(std::span<const std::uint32_t> symbols,
                                       const CdfTable& table) {
  RangeEncoder enc;
  for (std::uint32_t s : symbols) encode_symbol(enc, table, s);
  return enc.finish();
}

std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        const CdfTable& table, std::size_t count) {
  RangeDecoder dec(bytes);
  std::vector<std::uint32_t> out(count);
  for (auto& s : out) s = static_cast<std::uint32_t>(decode_symbol(dec, table));
  return out;
}

std::vector<std::uint8_t> range_encode(std::span<const std::uint32_t> symbols,
                                       std::span<const CdfTable> tables) {
  if (symbols.size() != tables.size()) {
    throw Error(ErrorCode::ModelMismatch, "one table per symbol required");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) encode_symbol(enc, tables[i], symbols[i]);
  return enc.finish();
}

std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        std::span<const CdfTable> tables) {
  RangeDecoder dec(bytes);
  std::vector<std::uint32_t> out(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(decode_symbol(dec, tables[i]));
  }
  return out;
}

std::vector<std::uint8_t> range_encode_adaptive(std::span<const std::uint32_t> symbols,
                                                std::size_t alphabet) {
  AdaptiveFrequencyModel model(alphabet);
  RangeEncoder enc;
  for (std::uint32_t s : symbols) model.encode(enc, s);
  return enc.finish();
}

std::vector<std::uint32_t> range_decode_adaptive(std::span<const std::uint8_t> bytes,
                                                 std::size_t alphabet, std::size_t count) {
  AdaptiveFrequencyModel model(alphabet);
  RangeDecoder dec(bytes);
  std::vector<std::uint32_t> out(count);
  for (auto& s : out) s = static_cast<std::uint32_t>(model.decode(dec));
  return out;
}

double estimate_bpp(std::span<const double> likelihoods_y, std::span<const double> likelihoods_z,
                    std::size_t pixel_count) {
  if (pixel_count == 0) throw Error(ErrorCode::InvalidArgument, "pixel count must be positive");
  double bits = 0.0;
  for (auto set : {likelihoods_y, likelihoods_z}) {
    for (double p : set) {
      if (!(p > 0.0)) throw Error(ErrorCode::NonPositiveLikelihood, "likelihood must be > 0");
      if (p > 1.0) throw Error(ErrorCode::InvalidArgument, "likelihood exceeds 1");
      bits -= std::log2(p);
    }
  }
  return bits / static_cast<double>(pixel_count);
}

double cross_entropy_bits(std::span<const std::uint32_t> symbols, const CdfTable& table) {
  double bits = 0.0;
  for (std::uint32_t s : symbols) bits -= std::log2(table.probability(s));
  return bits;
}

}  // namespace depthcodec
