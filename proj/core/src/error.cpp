#include "leolink/error.hpp"

namespace leolink {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::OutOfPass: return "OutOfPass";
    case ErrorCode::SlotTooLong: return "SlotTooLong";
    case ErrorCode::ZeroCrossingRate: return "ZeroCrossingRate";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroPower: return "ZeroPower";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool Error::is_input_error() const noexcept {
  switch (code_) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::UnknownKey:
    case ErrorCode::SlotTooLong:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

namespace detail {

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace detail
}  // namespace leolink
