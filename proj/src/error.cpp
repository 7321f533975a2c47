#include "stieltjes/error.hpp"

namespace stieltjes {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownCatalogName: return "UnknownCatalogName";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::SpecParse: return "SpecParse";
    case ErrorCode::SeriesDiverged: return "SeriesDiverged";
    case ErrorCode::MissingMarginal: return "MissingMarginal";
    case ErrorCode::NoDensityRoute: return "NoDensityRoute";
    case ErrorCode::NoClosedForm: return "NoClosedForm";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::QCollidesWithLambda: return "QCollidesWithLambda";
    case ErrorCode::GridDimensionMismatch: return "GridDimensionMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::QuadratureNonConvergence:
    case ErrorCode::PrecisionExhausted:
    case ErrorCode::SeriesDiverged:
    case ErrorCode::DerivativeUnavailable:
      return true;
    default:
      return false;
  }
}

}  // namespace stieltjes
