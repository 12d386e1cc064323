#pragma once

// How error codes surface outside the library: process exit codes for the
// CLI, HTTP status codes for the service.

#include "brickstart/error.hpp"

namespace brickstart {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;

constexpr int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoModelFound: return 2;
    case ErrorCode::ReferenceNotFound: return 3;
    case ErrorCode::AmbiguousReference: return 4;
    case ErrorCode::DimensionMismatch: return 5;
    case ErrorCode::DuplicateSide: return 6;
    case ErrorCode::MissingProfile: return 7;
    case ErrorCode::NotWatertight: return 8;
    case ErrorCode::Disconnected: return 9;
    case ErrorCode::EmptySolid: return 10;
    case ErrorCode::ResolutionTooCoarse: return 11;
    case ErrorCode::ParseError: return 12;
    case ErrorCode::VersionMismatch: return 13;
    case ErrorCode::StateConflict: return 14;
    case ErrorCode::NotFound: return 15;
    case ErrorCode::IoError: return 16;
    case ErrorCode::InvalidArgument: return 17;
  }
  return 1;
}

constexpr int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicateSide:
    case ErrorCode::MissingProfile:
    case ErrorCode::StateConflict:
    case ErrorCode::VersionMismatch: return 409;
    case ErrorCode::IoError: return 500;
    case ErrorCode::InvalidArgument:
    case ErrorCode::NoModelFound:
    case ErrorCode::ReferenceNotFound:
    case ErrorCode::AmbiguousReference:
    case ErrorCode::NotWatertight:
    case ErrorCode::Disconnected:
    case ErrorCode::EmptySolid:
    case ErrorCode::ResolutionTooCoarse: return 422;
  }
  return 500;
}

}  // namespace brickstart
