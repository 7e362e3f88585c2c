#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctmap {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidPolygon,
  kEmptyComponent,
  kShapeMismatch,
  kDomainError,
  kNonFiniteShift,
  kBadMagic,
  kBadVersion,
  kTruncatedPayload,
  kTrailingData,
  kUnsupportedDtype,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (and the CLI exit-code mapping) distinguish the cases.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ctmap
