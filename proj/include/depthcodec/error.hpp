// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace depthcodec {

enum class ErrorCode {
  AllInvalid,
  RangeViolation,
  BitsOutOfRange,
  SymbolOutOfRange,
  ModelMismatch,
  TruncatedStream,
  NonPositiveLikelihood,
  OddChannels,
  EmptyMask,
  ZeroRange,
  NonFinite,
  NonFiniteGradient,
  BadMagic,
  UnsupportedVersion,
  LengthMismatch,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type; `code()` identifies
// the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace depthcodec
