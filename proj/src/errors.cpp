#include "msmbias/errors.hpp"

namespace msmbias {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid_parameter";
    case ErrorCode::degenerate_observable: return "degenerate_observable";
    case ErrorCode::conditioning: return "conditioning";
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::non_positivity: return "non_positivity";
    case ErrorCode::infeasible_assumption: return "infeasible_assumption";
    case ErrorCode::degenerate_assumption: return "degenerate_assumption";
    case ErrorCode::inconsistent_observables: return "inconsistent_observables";
    case ErrorCode::estimation: return "estimation";
    case ErrorCode::positivity: return "positivity";
    case ErrorCode::analysis: return "analysis";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

}  // namespace msmbias
