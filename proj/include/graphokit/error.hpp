#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphokit {

enum class ErrorCode {
  // ink model
  EmptyRecording,
  NonMonotoneTime,
  ChannelOutOfRange,
  // svc / cohort ingestion
  MalformedHeader,
  SampleCountMismatch,
  FieldCountMismatch,
  NonNumericField,
  FileMissing,
  ParseError,
  MalformedManifest,
  MissingLabelColumn,
  IoError,
  // features
  DegenerateRecording,
  NoOnSurfaceSamples,
  EmptyScope,
  EmptyVector,
  TooShort,
  NotASpiral,
  DegenerateRadius,
  FitFailure,
  InsufficientLoops,
  // statistics
  EmptyGroup,
  LengthMismatch,
  ConstantInput,
  // boosting
  InvalidParams,
  SingleClass,
  NoUsableFeature,
  DimensionMismatch,
  // evaluation protocol
  EmptyMatrix,
  ClassTooSmall,
  DegenerateProbs,
  EmptyIntersection,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library. `context()` carries file/line or
// task information when the thrower has it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace graphokit
