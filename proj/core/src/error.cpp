#include "obkit/error.hpp"

namespace obkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::DegenerateTriangle: return "DEGENERATE_TRIANGLE";
    case ErrorCode::InvalidCamera: return "INVALID_CAMERA";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::MissingFile: return "MISSING_FILE";
    case ErrorCode::ChecksumMismatch: return "CHECKSUM_MISMATCH";
    case ErrorCode::NoPairs: return "NO_PAIRS";
    case ErrorCode::RejectNotThin: return "REJECT_NOT_THIN";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::MissingInput: return "MISSING_INPUT";
    case ErrorCode::ExternalFailure: return "EXTERNAL_FAILURE";
    case ErrorCode::EmptyDataset: return "EMPTY_DATASET";
    case ErrorCode::EmptyGt: return "EMPTY_GT";
    case ErrorCode::NotThin: return "NOT_THIN";
  }
  return "UNKNOWN";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ExternalFailure:
      return false;
    default:
      return true;
  }
}

}  // namespace obkit
