#include "randinf/error.hpp"

namespace randinf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NegativeErrorSd: return "NegativeErrorSd";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::WrongDesign: return "WrongDesign";
    case ErrorCode::SameTreatment: return "SameTreatment";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace randinf
