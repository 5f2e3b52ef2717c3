#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace timexplain {

enum class ErrorKind {
  // core
  InvalidLength,
  NonUniformLength,
  NonFiniteValue,
  LabelCountMismatch,
  AdditivityViolation,
  // dsp
  OverlappingBands,
  BandOutOfRange,
  SingularDesignSystem,
  InvalidFilterLength,
  FilterLongerThanSeries,
  // mappings
  FragmentCountOutOfRange,
  EmptyReference,
  VarianceUndefined,
  DimensionMismatch,
  ZeroVariance,
  // shap
  DegenerateCoalition,
  RankDeficient,
  TooManyFragments,
  // explain
  InvalidConfig,
  MissingLabels,
  EmptyClass,
  // similarity
  AllUndefined,
  IncompatibleExplanations,
  // models
  EmptyTrainingSet,
  InvalidArgument,
  ProtocolViolation,
  Timeout,
  ProcessExit,
  // io
  ParseError,
  SchemaVersionMismatch,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure in the library is reported as an Error carrying a kind, so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace timexplain
