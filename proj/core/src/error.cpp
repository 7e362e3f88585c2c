#include "ctmap/error.hpp"

namespace ctmap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidPolygon: return "InvalidPolygon";
    case ErrorCode::kEmptyComponent: return "EmptyComponent";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNonFiniteShift: return "NonFiniteShift";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadVersion: return "BadVersion";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kTrailingData: return "TrailingData";
    case ErrorCode::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ctmap
