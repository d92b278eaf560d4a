#include "graphokit/error.hpp"

namespace graphokit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyRecording: return "EmptyRecording";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::SampleCountMismatch: return "SampleCountMismatch";
    case ErrorCode::FieldCountMismatch: return "FieldCountMismatch";
    case ErrorCode::NonNumericField: return "NonNumericField";
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateRecording: return "DegenerateRecording";
    case ErrorCode::NoOnSurfaceSamples: return "NoOnSurfaceSamples";
    case ErrorCode::EmptyScope: return "EmptyScope";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NotASpiral: return "NotASpiral";
    case ErrorCode::DegenerateRadius: return "DegenerateRadius";
    case ErrorCode::FitFailure: return "FitFailure";
    case ErrorCode::InsufficientLoops: return "InsufficientLoops";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoUsableFeature: return "NoUsableFeature";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::DegenerateProbs: return "DegenerateProbs";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace graphokit
