#include "sftdim/errors.hpp"

namespace sftdim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::StrandedSymbol: return "StrandedSymbol";
    case ErrorCode::BadTheta: return "BadTheta";
    case ErrorCode::Inadmissible: return "Inadmissible";
    case ErrorCode::WordTooShort: return "WordTooShort";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::RowSum: return "RowSum";
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::NonPositiveFunction: return "NonPositiveFunction";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateLevelSet: return "DegenerateLevelSet";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::Numeric: return "Numeric";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace sftdim
