#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pupilshape {

enum class ErrorCode {
  EmptyMask,
  DegenerateInput,
  NoEllipseSolution,
  NotAnEllipse,
  DimensionMismatch,
  BothEmpty,
  SegmentationFailed,
  OneClassOnly,
  InvalidSpec,
  InvalidArgument,
  IoError,
  ManifestError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NoEllipseSolution: return "NoEllipseSolution";
    case ErrorCode::NotAnEllipse: return "NotAnEllipse";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::SegmentationFailed: return "SegmentationFailed";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ManifestError: return "ManifestError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace pupilshape
