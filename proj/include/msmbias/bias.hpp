#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "msmbias/errors.hpp"
#include "msmbias/params.hpp"

namespace msmbias {

// phi[a][lstar] = P(L = 1 | A = a, L* = lstar).
using PhiTable = std::array<std::array<double, 2>, 2>;

// Coefficients of the population linear projection of A*L* on (1, A, L*).
struct UCoefficients {
  double u0 = 0.0;
  double uA = 0.0;
  double uLstar = 0.0;
};

struct ImpliedQuantities {
  PhiTable phi{};
  double delta = 0.0;  // gamma (phi11 - phi10 - phi01 + phi00)
  UCoefficients u;
};

struct BiasPair {
  double bias_cm = 0.0;
  double bias_msm = 0.0;
};

// Population coefficients of E[Y | A, L*] (with interaction) or of its
// projection onto main effects (without). `interaction` is zero for the
// main-effects model.
struct ConditionalCoefficients {
  double intercept = 0.0;
  double treatment = 0.0;
  double lstar = 0.0;
  double interaction = 0.0;
};

ObservedSummary implied_observables(const LatentParams& p);

double phi(int a, int lstar, const LatentParams& p);
PhiTable phi_table(const LatentParams& p);

UCoefficients u_coefficients(const LatentParams& p);
ImpliedQuantities implied_quantities(const LatentParams& p);

double bias_conditional(const LatentParams& p);
double bias_msm(const LatentParams& p);
BiasPair bias_pair(const LatentParams& p);

ConditionalCoefficients implied_conditional_coefficients(const LatentParams& p,
                                                         bool with_interaction);

struct InvertedParams {
  double lambda = 0.0;
  double pi0 = 0.0;
  double pi1 = 0.0;
};

// Default tolerated gap between obs.omega and pi_star0 (1 - ell) + pi_star1 ell.
// Summaries rounded to two decimals routinely disagree by ~0.01.
inline constexpr double kDefaultOmegaTolerance = 0.01;

// Recovers (lambda, pi0, pi1) from observable summaries under assumed
// misclassification probabilities p0 = 1 - specificity, p1 = sensitivity.
InvertedParams invert_observables(const ObservedSummary& obs, double p0, double p1,
                                  double omega_tolerance = kDefaultOmegaTolerance);

// Builds full latent params from an inversion plus outcome-model parameters.
LatentParams latent_from_observables(const ObservedSummary& obs, double p0, double p1,
                                     double gamma, double alpha = 1.0, double beta = 1.0,
                                     double sigma = 1.0,
                                     double omega_tolerance = kDefaultOmegaTolerance);

enum class SweepParameter { lambda, pi0, pi1, p0, p1, gamma };

std::string_view to_string(SweepParameter s) noexcept;
// Throws DomainError(invalid_parameter) for an unknown id.
SweepParameter parse_sweep_parameter(std::string_view id);

struct CurvePoint {
  double x = 0.0;
  std::optional<BiasPair> bias;          // empty at undefined points
  std::optional<ErrorCode> undefined_reason;
};

std::vector<CurvePoint> bias_curve(const LatentParams& p, SweepParameter parameter,
                                   std::span<const double> grid);

// Evenly spaced grid with `points` values from `lo` to `hi` inclusive.
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace msmbias
