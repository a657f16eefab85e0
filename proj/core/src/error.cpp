#include "eroscan/error.hpp"

namespace eroscan {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kInvalidPolygon: return "InvalidPolygon";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kInvalidFractions: return "InvalidFractions";
    case ErrorCode::kInvalidClassMap: return "InvalidClassMap";
    case ErrorCode::kInvalidDataset: return "InvalidDataset";
    case ErrorCode::kMissingGsd: return "MissingGSD";
    case ErrorCode::kTileLargerThanImage: return "TileLargerThanImage";
    case ErrorCode::kInvalidGrid: return "InvalidGrid";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMissingConfidence: return "MissingConfidence";
    case ErrorCode::kConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace eroscan
