#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irisvigil {

enum class ErrorCode {
  InvalidParameter,
  DimensionMismatch,
  ImaginaryResidue,
  InvalidTemplate,
  NoPupilMask,
  DegenerateChord,
  CircleOutOfBounds,
  NoConvergence,
  KernelLargerThanImage,
  DegenerateCovariance,
  EmptyCluster,
  InvalidInput,
  NonMonotonicTimestamps,
  InvalidSpec,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::InvalidTemplate: return "InvalidTemplate";
    case ErrorCode::NoPupilMask: return "NoPupilMask";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::CircleOutOfBounds: return "CircleOutOfBounds";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::KernelLargerThanImage: return "KernelLargerThanImage";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace irisvigil
