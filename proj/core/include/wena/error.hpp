#pragma once

#include <stdexcept>
#include <string>

namespace wena {

enum class ErrorCode {
    FileNotFound,
    ParseError,
    MissingColumn,
    DuplicateSubject,
    RoiCountMismatch,
    NonFiniteValue,
    TooFewTimePoints,
    ConstantSeries,
    DimensionMismatch,
    InvalidArgument,
    Diverged,
    NoConvergence,
    DegenerateWeights,
    LayersOutOfRange,
    SingularSystem,
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the toolkit; `code` identifies the failure
/// class so callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::DuplicateSubject: return "DuplicateSubject";
        case ErrorCode::RoiCountMismatch: return "RoiCountMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::TooFewTimePoints: return "TooFewTimePoints";
        case ErrorCode::ConstantSeries: return "ConstantSeries";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateWeights: return "DegenerateWeights";
        case ErrorCode::LayersOutOfRange: return "LayersOutOfRange";
        case ErrorCode::SingularSystem: return "SingularSystem";
    }
    return "Unknown";
}

}  // namespace wena
