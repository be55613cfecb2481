#include "msmbias/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "msmbias/errors.hpp"

namespace msmbias {

namespace {

int covariate(const Record& r, Adjustment adjustment) {
  return adjustment == Adjustment::l ? r.l : r.lstar;
}

FitResult finish(double ate, double se, Estimator estimator, Adjustment adjustment) {
  FitResult fit;
  fit.ate_hat = ate;
  fit.model_se = se;
  fit.ci_low = ate - kWaldZ * se;
  fit.ci_high = ate + kWaldZ * se;
  fit.estimator = estimator;
  fit.adjustment = adjustment;
  return fit;
}

}  // namespace

void validate(const Dataset& d) {
  if (d.records.empty()) {
    throw DomainError(ErrorCode::invalid_parameter, "dataset is empty");
  }
  for (const auto& r : d.records) {
    if (r.l > 1 || r.lstar > 1 || r.a > 1) {
      throw DomainError(ErrorCode::invalid_parameter, "binary fields must be 0 or 1");
    }
  }
}

std::string_view to_string(Estimator e) noexcept {
  return e == Estimator::conditional ? "cm" : "msm";
}

std::string_view to_string(Adjustment a) noexcept {
  switch (a) {
    case Adjustment::none: return "none";
    case Adjustment::l: return "L";
    case Adjustment::lstar: return "Lstar";
  }
  return "unknown";
}

FitResult fit_conditional(const Dataset& d, Adjustment adjustment) {
  validate(d);
  const Eigen::Index k = adjustment == Adjustment::none ? 2 : 3;
  const auto n = static_cast<Eigen::Index>(d.size());
  if (n <= k) {
    throw DomainError(ErrorCode::estimation,
                      "need more records than coefficients for a residual variance");
  }
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd x(k);
  for (const auto& r : d.records) {
    x(0) = 1.0;
    x(1) = r.a;
    if (k == 3) x(2) = covariate(r, adjustment);
    xtx.noalias() += x * x.transpose();
    xty += r.y * x;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (lu.rank() < k) {
    throw DomainError(ErrorCode::estimation,
                      "design matrix is rank deficient (treatment or adjustment variable is "
                      "constant or collinear)");
  }
  const Eigen::VectorXd coef = lu.solve(xty);
  double rss = 0.0;
  for (const auto& r : d.records) {
    x(0) = 1.0;
    x(1) = r.a;
    if (k == 3) x(2) = covariate(r, adjustment);
    const double e = r.y - x.dot(coef);
    rss += e * e;
  }
  const double sigma2 = rss / static_cast<double>(n - k);
  const double se = std::sqrt(sigma2 * lu.inverse()(1, 1));
  return finish(coef(1), se, Estimator::conditional, adjustment);
}

FitResult fit_msm_ipw(const Dataset& d, Adjustment adjustment) {
  validate(d);
  if (adjustment == Adjustment::none) {
    throw DomainError(ErrorCode::invalid_parameter,
                      "MSM-IPW needs an adjustment variable (L or Lstar)");
  }
  std::array<std::array<double, 2>, 2> count{};
  for (const auto& r : d.records) count[covariate(r, adjustment)][r.a] += 1.0;
  std::array<std::array<double, 2>, 2> inv_prob{};
  for (int v = 0; v < 2; ++v) {
    const double nv = count[v][0] + count[v][1];
    if (nv == 0.0) continue;
    for (int a = 0; a < 2; ++a) {
      if (count[v][a] == 0.0) {
        throw DomainError(ErrorCode::positivity,
                          "empty stratum: no records with A = " + std::to_string(a) + " among " +
                              std::string(to_string(adjustment)) + " = " + std::to_string(v));
      }
      inv_prob[v][a] = nv / count[v][a];
    }
  }

  const std::size_t n = d.size();
  std::vector<double> w(n);
  double sw = 0.0, swa = 0.0, swy = 0.0;
  WeightDiagnostics diag;
  diag.min = std::numeric_limits<double>::infinity();
  diag.max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = d.records[i];
    w[i] = inv_prob[covariate(r, adjustment)][r.a];
    sw += w[i];
    swa += w[i] * r.a;
    swy += w[i] * r.y;
    diag.min = std::min(diag.min, w[i]);
    diag.max = std::max(diag.max, w[i]);
  }
  const double mean_a = swa / sw;
  const double mean_y = swy / sw;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = d.records[i].a - mean_a;
    sxy += w[i] * (d.records[i].y - mean_y) * da;
    sxx += w[i] * da * da;
  }
  if (!(sxx > 0.0)) {
    throw DomainError(ErrorCode::estimation, "treatment is constant; slope is not estimable");
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_a;

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = 1.0;
    design(row, 1) = d.records[i].a;
    resid[i] = d.records[i].y - intercept - slope * d.records[i].a;
  }
  FitResult fit = finish(slope, sandwich_se(design, w, resid, 1), Estimator::msm_ipw, adjustment);
  diag.mean = sw / static_cast<double>(n);
  diag.weighted_mean_treatment = mean_a;
  fit.weights = diag;
  return fit;
}

double sandwich_se(const Eigen::MatrixXd& design, std::span<const double> weights,
                   std::span<const double> residuals, Eigen::Index coefficient) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  if (static_cast<Eigen::Index>(weights.size()) != n ||
      static_cast<Eigen::Index>(residuals.size()) != n || coefficient < 0 || coefficient >= k) {
    throw DomainError(ErrorCode::invalid_parameter,
                      "design, weights and residuals must agree in length");
  }
  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = design.row(i).transpose();
    const double w = weights[static_cast<std::size_t>(i)];
    const double e = residuals[static_cast<std::size_t>(i)];
    bread.noalias() += w * x * x.transpose();
    meat.noalias() += (w * w * e * e) * x * x.transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(bread);
  if (lu.rank() < k) {
    throw DomainError(ErrorCode::singular_design, "bread matrix X'WX is singular");
  }
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::MatrixXd cov = inv * meat * inv;
  return std::sqrt(cov(coefficient, coefficient));
}

}  // namespace msmbias
