#include "netlap/error.hpp"

namespace netlap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeConductance: return "NegativeConductance";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::OriginDipole: return "OriginDipole";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::UnsupportedTestVector: return "UnsupportedTestVector";
    case ErrorCode::NotBalanced: return "NotBalanced";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::UnsupportedTopology: return "UnsupportedTopology";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::NotExact: return "NotExact";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace netlap
