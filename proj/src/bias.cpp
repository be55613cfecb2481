#include "msmbias/bias.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msmbias {

namespace {

constexpr double kSingularTolerance = 1e-12;

bool prevalence_is_degenerate(const LatentParams& p) {
  return p.lambda == 0.0 || p.lambda == 1.0;
}

bool no_misclassification(const LatentParams& p) { return p.p0 == 0.0 && p.p1 == 1.0; }

void require_positivity(const LatentParams& p) {
  auto interior = [](double x) { return x > 0.0 && x < 1.0; };
  if (!interior(p.pi0) || !interior(p.pi1)) {
    throw DomainError(ErrorCode::non_positivity,
                      "positivity violated: pi0 and pi1 must lie in (0, 1) when lambda is in "
                      "(0, 1); bias is not defined");
  }
}

double bernoulli(double prob, int outcome) { return outcome == 1 ? prob : 1.0 - prob; }

}  // namespace

ObservedSummary implied_observables(const LatentParams& p) {
  validate(p);
  const double ell = p.p0 * (1.0 - p.lambda) + p.p1 * p.lambda;
  const double omega = p.pi0 * (1.0 - p.lambda) + p.pi1 * p.lambda;
  if (ell <= 0.0 || ell >= 1.0) {
    throw DomainError(ErrorCode::degenerate_observable,
                      "P(L* = 1) is " + std::to_string(ell) +
                          "; P(A = 1 | L* = l*) is undefined for the empty stratum");
  }
  ObservedSummary obs;
  obs.ell = ell;
  obs.omega = omega;
  obs.pi_star0 =
      (p.pi0 * (1.0 - p.p0) * (1.0 - p.lambda) + p.pi1 * (1.0 - p.p1) * p.lambda) / (1.0 - ell);
  obs.pi_star1 = (p.pi0 * p.p0 * (1.0 - p.lambda) + p.pi1 * p.p1 * p.lambda) / ell;
  return obs;
}

namespace {

// phi from already-computed observables; avoids recomputing them per cell.
double phi_given(int a, int lstar, const LatentParams& p, const ObservedSummary& obs) {
  const double pi_star = lstar == 1 ? obs.pi_star1 : obs.pi_star0;
  const double denominator = bernoulli(pi_star, a) * bernoulli(obs.ell, lstar);
  if (!(denominator > 0.0)) {
    throw DomainError(ErrorCode::conditioning,
                      "P(A = " + std::to_string(a) + ", L* = " + std::to_string(lstar) +
                          ") is zero; phi is undefined");
  }
  if (no_misclassification(p)) {
    return static_cast<double>(lstar);
  }
  const double numerator = p.lambda * bernoulli(p.pi1, a) * bernoulli(p.p1, lstar);
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

PhiTable phi_table_given(const LatentParams& p, const ObservedSummary& obs) {
  PhiTable table{};
  for (int a = 0; a < 2; ++a) {
    for (int lstar = 0; lstar < 2; ++lstar) {
      table[a][lstar] = phi_given(a, lstar, p, obs);
    }
  }
  return table;
}

UCoefficients u_given(const ObservedSummary& obs) {
  const double var_a = obs.omega * (1.0 - obs.omega);
  const double var_lstar = obs.ell * (1.0 - obs.ell);
  const double diff = obs.pi_star1 - obs.pi_star0;
  // Var(A) - Cov(A, L*)^2 / Var(L*), i.e. the determinant divided by Var(L*).
  const double reduced = var_a - diff * diff * var_lstar;
  if (!(var_a > 0.0) || !(var_lstar > 0.0) || !(var_lstar * reduced > kSingularTolerance)) {
    throw DomainError(ErrorCode::singular_design,
                      "design (1, A, L*) is singular: A and L* are collinear or constant");
  }
  UCoefficients u;
  u.uA = (obs.pi_star1 * obs.ell * (1.0 - obs.omega) - obs.pi_star1 * diff * var_lstar) / reduced;
  u.uLstar = (obs.pi_star1 * var_a - diff * obs.pi_star1 * obs.ell * (1.0 - obs.omega)) / reduced;
  u.u0 = obs.pi_star1 * obs.ell - u.uA * obs.omega - u.uLstar * obs.ell;
  return u;
}

}  // namespace

double phi(int a, int lstar, const LatentParams& p) {
  if ((a != 0 && a != 1) || (lstar != 0 && lstar != 1)) {
    throw DomainError(ErrorCode::invalid_parameter, "a and lstar must be 0 or 1");
  }
  return phi_given(a, lstar, p, implied_observables(p));
}

PhiTable phi_table(const LatentParams& p) { return phi_table_given(p, implied_observables(p)); }

UCoefficients u_coefficients(const LatentParams& p) { return u_given(implied_observables(p)); }

ImpliedQuantities implied_quantities(const LatentParams& p) {
  const ObservedSummary obs = implied_observables(p);
  ImpliedQuantities q;
  q.phi = phi_table_given(p, obs);
  q.delta = p.gamma * (q.phi[1][1] - q.phi[1][0] - q.phi[0][1] + q.phi[0][0]);
  q.u = u_given(obs);
  return q;
}

double bias_conditional(const LatentParams& p) {
  validate(p);
  if (prevalence_is_degenerate(p)) return 0.0;
  require_positivity(p);
  const ObservedSummary obs = implied_observables(p);
  const PhiTable f = phi_table_given(p, obs);
  // Weight of the L* = 1 contrast; equals the bracketed ell * {...} term.
  const double t = u_given(obs).uA;
  return p.gamma * (f[1][0] - f[0][0]) * (1.0 - t) + p.gamma * (f[1][1] - f[0][1]) * t;
}

double bias_msm(const LatentParams& p) {
  validate(p);
  if (prevalence_is_degenerate(p)) return 0.0;
  require_positivity(p);
  const ObservedSummary obs = implied_observables(p);
  const PhiTable f = phi_table_given(p, obs);
  return p.gamma * (f[1][0] - f[0][0]) * (1.0 - obs.ell) +
         p.gamma * (f[1][1] - f[0][1]) * obs.ell;
}

BiasPair bias_pair(const LatentParams& p) { return {bias_conditional(p), bias_msm(p)}; }

ConditionalCoefficients implied_conditional_coefficients(const LatentParams& p,
                                                         bool with_interaction) {
  const ImpliedQuantities q = implied_quantities(p);
  const auto& f = q.phi;
  ConditionalCoefficients c;
  c.intercept = p.alpha + p.gamma * f[0][0];
  c.treatment = p.beta + p.gamma * (f[1][0] - f[0][0]);
  c.lstar = p.gamma * (f[0][1] - f[0][0]);
  if (with_interaction) {
    c.interaction = q.delta;
  } else {
    c.intercept += q.delta * q.u.u0;
    c.treatment += q.delta * q.u.uA;
    c.lstar += q.delta * q.u.uLstar;
  }
  return c;
}

InvertedParams invert_observables(const ObservedSummary& obs, double p0, double p1,
                                  double omega_tolerance) {
  validate(obs);
  if (!is_probability(p0) || !is_probability(p1)) {
    throw DomainError(ErrorCode::invalid_parameter, "p0 and p1 must be probabilities");
  }
  if (std::abs(p1 - p0) < 1e-12) {
    throw DomainError(ErrorCode::degenerate_assumption,
                      "p1 equals p0: L* carries no information about L, inversion is undefined");
  }
  const double omega_implied = obs.pi_star0 * (1.0 - obs.ell) + obs.pi_star1 * obs.ell;
  if (std::abs(obs.omega - omega_implied) > omega_tolerance) {
    throw DomainError(ErrorCode::inconsistent_observables,
                      "omega = " + std::to_string(obs.omega) +
                          " disagrees with pi_star0 (1 - ell) + pi_star1 ell = " +
                          std::to_string(omega_implied));
  }

  auto infeasible = [&](const char* name, double value) {
    return DomainError(ErrorCode::infeasible_assumption,
                       std::string("assumed (p0, p1) = (") + std::to_string(p0) + ", " +
                           std::to_string(p1) + ") implies " + name + " = " +
                           std::to_string(value) + " outside [0, 1]");
  };
  auto settle = [&](double value, const char* name) {
    if (value < -kIdentityTolerance || value > 1.0 + kIdentityTolerance) {
      throw infeasible(name, value);
    }
    return std::clamp(value, 0.0, 1.0);
  };

  InvertedParams out;
  out.lambda = settle((obs.ell - p0) / (p1 - p0), "lambda");
  if (out.lambda == 0.0 || out.lambda == 1.0) {
    throw DomainError(ErrorCode::degenerate_observable,
                      "implied lambda is 0 or 1; treatment probability in the empty stratum is "
                      "not identifiable");
  }
  // (1 - p0) p1 - (1 - p1) p0 simplifies to p1 - p0, so the closed form for
  // pi1 reduces to the expression below and stays finite at p0 = 1 or p1 = 0.
  const double pi1 = (obs.pi_star1 * obs.ell * (1.0 - p0) - obs.pi_star0 * (1.0 - obs.ell) * p0) /
                     (out.lambda * (p1 - p0));
  out.pi1 = settle(pi1, "pi1");
  double pi0 = 0.0;
  if (1.0 - p0 >= p0) {
    pi0 = (obs.pi_star0 * (1.0 - obs.ell) - pi1 * (1.0 - p1) * out.lambda) /
          ((1.0 - p0) * (1.0 - out.lambda));
  } else {
    pi0 = (obs.pi_star1 * obs.ell - pi1 * p1 * out.lambda) / (p0 * (1.0 - out.lambda));
  }
  out.pi0 = settle(pi0, "pi0");
  return out;
}

LatentParams latent_from_observables(const ObservedSummary& obs, double p0, double p1,
                                     double gamma, double alpha, double beta, double sigma,
                                     double omega_tolerance) {
  const InvertedParams inv = invert_observables(obs, p0, p1, omega_tolerance);
  LatentParams p;
  p.lambda = inv.lambda;
  p.pi0 = inv.pi0;
  p.pi1 = inv.pi1;
  p.p0 = p0;
  p.p1 = p1;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.sigma = sigma;
  return p;
}

std::string_view to_string(SweepParameter s) noexcept {
  switch (s) {
    case SweepParameter::lambda: return "lambda";
    case SweepParameter::pi0: return "pi0";
    case SweepParameter::pi1: return "pi1";
    case SweepParameter::p0: return "p0";
    case SweepParameter::p1: return "p1";
    case SweepParameter::gamma: return "gamma";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view id) {
  for (auto s : {SweepParameter::lambda, SweepParameter::pi0, SweepParameter::pi1,
                 SweepParameter::p0, SweepParameter::p1, SweepParameter::gamma}) {
    if (to_string(s) == id) return s;
  }
  throw DomainError(ErrorCode::invalid_parameter,
                    "unknown sweep parameter '" + std::string(id) +
                        "' (expected lambda, pi0, pi1, p0, p1 or gamma)");
}

std::vector<CurvePoint> bias_curve(const LatentParams& p, SweepParameter parameter,
                                   std::span<const double> grid) {
  std::vector<CurvePoint> points;
  points.reserve(grid.size());
  for (double x : grid) {
    LatentParams q = p;
    switch (parameter) {
      case SweepParameter::lambda: q.lambda = x; break;
      case SweepParameter::pi0: q.pi0 = x; break;
      case SweepParameter::pi1: q.pi1 = x; break;
      case SweepParameter::p0: q.p0 = x; break;
      case SweepParameter::p1: q.p1 = x; break;
      case SweepParameter::gamma: q.gamma = x; break;
    }
    validate(q);
    CurvePoint point;
    point.x = x;
    try {
      point.bias = bias_pair(q);
    } catch (const DomainError& e) {
      point.undefined_reason = e.code();
    }
    points.push_back(point);
  }
  return points;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) {
    throw DomainError(ErrorCode::invalid_parameter, "grid needs at least one point");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
  grid.back() = hi;
  return grid;
}

}  // namespace msmbias
