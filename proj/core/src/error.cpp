#include "cwvo/error.hpp"

namespace cwvo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidDepth: return "invalid-depth";
    case ErrorKind::kBehindCamera: return "behind-camera";
    case ErrorKind::kNearSingular: return "near-singular";
    case ErrorKind::kSampleOutOfBounds: return "sample-out-of-bounds";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kProviderIo: return "provider-io";
    case ErrorKind::kMissingGroundTruth: return "missing-ground-truth";
    case ErrorKind::kTrackingDegenerate: return "tracking-degenerate";
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kInsufficientOverlap: return "insufficient-overlap";
    case ErrorKind::kNoAssociation: return "no-associable-pairs";
  }
  return "unknown";
}

}  // namespace cwvo
