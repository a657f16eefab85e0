#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eroscan {

enum class ErrorCode {
  kMalformedLine,
  kOutOfRange,
  kUnknownClass,
  kInvalidPolygon,
  kModeMismatch,
  kInvalidFractions,
  kInvalidClassMap,
  kInvalidDataset,
  kMissingGsd,
  kTileLargerThanImage,
  kInvalidGrid,
  kOutOfBounds,
  kInvalidArgument,
  kDimensionMismatch,
  kMissingConfidence,
  kConfidenceOutOfRange,
  kUnsupportedFormat,
  kIoError,
};

/// Stable, machine-parseable name of an error code, e.g. "MalformedLine".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace eroscan
