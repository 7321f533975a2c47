#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stieltjes {

enum class ErrorCode {
  InvalidArgument,
  UnknownCatalogName,
  ParameterOutOfRange,
  SpecParse,
  SeriesDiverged,
  MissingMarginal,
  NoDensityRoute,
  NoClosedForm,
  QuadratureNonConvergence,
  DimensionTooLarge,
  DerivativeUnavailable,
  PrecisionExhausted,
  QCollidesWithLambda,
  GridDimensionMismatch,
  GridMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Failures that come from finite-precision numerics rather than bad input.
bool is_numerical_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stieltjes
