#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mstab {

/// Failure categories. The numeric value doubles as the CLI exit code, so
/// entries must never be reordered.
enum class ErrorCode : int {
  InvalidArgument = 2,
  IoError = 3,
  MalformedLine = 10,
  NonPositiveWeight = 11,
  SelfLoop = 12,
  Disconnected = 13,
  ConflictingDuplicateEdge = 14,
  AsymmetricEdgeList = 15,
  MissingCommunityLabel = 16,
  GenerationFailed = 17,
  ZeroDegree = 20,
  EigensolverFailure = 21,
  DimOutOfRange = 22,
  ModeBasisMismatch = 23,
  SizeMismatch = 30,
  NonEuclideanEmbedding = 31,
  SameGroup = 40,
  LevelCapExceeded = 41,
  TooLarge = 42,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::ConflictingDuplicateEdge: return "ConflictingDuplicateEdge";
    case ErrorCode::AsymmetricEdgeList: return "AsymmetricEdgeList";
    case ErrorCode::MissingCommunityLabel: return "MissingCommunityLabel";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::DimOutOfRange: return "DimOutOfRange";
    case ErrorCode::ModeBasisMismatch: return "ModeBasisMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonEuclideanEmbedding: return "NonEuclideanEmbedding";
    case ErrorCode::SameGroup: return "SameGroup";
    case ErrorCode::LevelCapExceeded: return "LevelCapExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mstab
