// Copyright 2026 The depthcodec Authors
// SPDX-License-Identifier: Apache-2.0

#include "depthcodec/error.hpp"

namespace depthcodec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllInvalid: return "AllInvalid";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::BitsOutOfRange: return "BitsOutOfRange";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::TruncatedStream: return "TruncatedStream";
    case ErrorCode::NonPositiveLikelihood: return "NonPositiveLikelihood";
    case ErrorCode::OddChannels: return "OddChannels";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ZeroRange: return "ZeroRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace depthcodec
