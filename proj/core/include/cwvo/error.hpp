#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwvo {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidDepth,
  kBehindCamera,
  kNearSingular,
  kSampleOutOfBounds,
  kShape,
  kProviderIo,
  kMissingGroundTruth,
  kTrackingDegenerate,
  kDegenerateGeometry,
  kIo,
  kParse,
  kValidation,
  kInsufficientOverlap,
  kNoAssociation,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library carries a kind so callers (the CLI in
// particular) can map it onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cwvo
