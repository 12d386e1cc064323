#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace brickstart {

/// Failure classes shared by the library, the CLI (exit codes) and the
/// HTTP service (status codes).
enum class ErrorCode {
  InvalidArgument,
  NoModelFound,
  ReferenceNotFound,
  AmbiguousReference,
  DimensionMismatch,
  DuplicateSide,
  MissingProfile,
  NotWatertight,
  Disconnected,
  EmptySolid,
  ResolutionTooCoarse,
  ParseError,
  VersionMismatch,
  StateConflict,
  NotFound,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NoModelFound: return "no_model_found";
    case ErrorCode::ReferenceNotFound: return "reference_not_found";
    case ErrorCode::AmbiguousReference: return "ambiguous_reference";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::DuplicateSide: return "duplicate_side";
    case ErrorCode::MissingProfile: return "missing_profile";
    case ErrorCode::NotWatertight: return "not_watertight";
    case ErrorCode::Disconnected: return "disconnected";
    case ErrorCode::EmptySolid: return "empty_solid";
    case ErrorCode::ResolutionTooCoarse: return "resolution_too_coarse";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::VersionMismatch: return "version_mismatch";
    case ErrorCode::StateConflict: return "state_conflict";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code and the pipeline stage that
/// raised it ("preprocess", "reconstruct", "project", ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

/// Non-fatal diagnostic attached to an otherwise successful result.
struct Warning {
  std::string code;
  std::string message;

  bool operator==(const Warning&) const = default;
};

inline constexpr std::string_view kWarnDisconnectedParts = "disconnected_parts";
inline constexpr std::string_view kWarnDisjointPrimitive = "disjoint_primitive";

}  // namespace brickstart
