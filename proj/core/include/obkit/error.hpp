#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace obkit {

enum class ErrorCode {
  ParseError,
  DegenerateTriangle,
  InvalidCamera,
  InvalidArgument,
  IoError,
  MissingFile,
  ChecksumMismatch,
  NoPairs,
  RejectNotThin,
  DimensionMismatch,
  MissingInput,
  ExternalFailure,
  EmptyDataset,
  EmptyGt,
  NotThin,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Failures that originate from bad input data. Everything else that escapes
/// the library is treated as an internal fault by the CLI.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace obkit
