#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msmbias {

// Machine-readable domain error taxonomy. Shared by the CLI (exit code 2)
// and the HTTP service (status 422).
enum class ErrorCode {
  invalid_parameter,
  degenerate_observable,
  conditioning,
  singular_design,
  non_positivity,
  infeasible_assumption,
  degenerate_assumption,
  inconsistent_observables,
  estimation,
  positivity,
  analysis,
  parse,
};

std::string_view to_string(ErrorCode code) noexcept;

class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace msmbias
