#pragma once

#include <array>

namespace msmbias {

// Generative parameters of the point-treatment model with one binary
// confounder L observed through a non-differentially misclassified L*.
//
//   L ~ Bern(lambda),  A | L ~ Bern(pi_L),  L* | L ~ Bern(p_L),
//   Y | A, L ~ Normal(alpha + beta A + gamma L, sigma^2).
//
// p1 is the sensitivity of L*, 1 - p0 its specificity.
struct LatentParams {
  double lambda = 0.5;
  double pi0 = 0.5;
  double pi1 = 0.5;
  double p0 = 0.0;
  double p1 = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double sigma = 1.0;

  friend bool operator==(const LatentParams&, const LatentParams&) = default;
};

// Summary statistics that are estimable from (L*, A) data alone.
struct ObservedSummary {
  double ell = 0.0;       // P(L* = 1)
  double omega = 0.0;     // P(A = 1)
  double pi_star0 = 0.0;  // P(A = 1 | L* = 0)
  double pi_star1 = 0.0;  // P(A = 1 | L* = 1)

  friend bool operator==(const ObservedSummary&, const ObservedSummary&) = default;
};

// Throws DomainError(invalid_parameter) naming the offending field.
void validate(const LatentParams& p);
void validate(const ObservedSummary& obs);

bool is_probability(double x) noexcept;

// Tolerances used throughout: algebraic identities and oracle comparisons.
inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kOracleTolerance = 1e-10;

}  // namespace msmbias
