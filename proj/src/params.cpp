#include "msmbias/params.hpp"

#include <cmath>
#include <string>

#include "msmbias/errors.hpp"

namespace msmbias {

namespace {

void require_probability(double x, const char* name) {
  if (!is_probability(x)) {
    throw DomainError(ErrorCode::invalid_parameter,
                      std::string(name) + " must be a probability in [0, 1], got " +
                          std::to_string(x));
  }
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw DomainError(ErrorCode::invalid_parameter, std::string(name) + " must be finite");
  }
}

}  // namespace

bool is_probability(double x) noexcept { return x >= 0.0 && x <= 1.0; }

void validate(const LatentParams& p) {
  require_probability(p.lambda, "lambda");
  require_probability(p.pi0, "pi0");
  require_probability(p.pi1, "pi1");
  require_probability(p.p0, "p0");
  require_probability(p.p1, "p1");
  require_finite(p.alpha, "alpha");
  require_finite(p.beta, "beta");
  require_finite(p.gamma, "gamma");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw DomainError(ErrorCode::invalid_parameter, "sigma must be positive and finite");
  }
}

void validate(const ObservedSummary& obs) {
  require_probability(obs.ell, "ell");
  require_probability(obs.omega, "omega");
  require_probability(obs.pi_star0, "pi_star0");
  require_probability(obs.pi_star1, "pi_star1");
}

}  // namespace msmbias
