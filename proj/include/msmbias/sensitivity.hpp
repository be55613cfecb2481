#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "msmbias/bias.hpp"
#include "msmbias/errors.hpp"
#include "msmbias/estimators.hpp"
#include "msmbias/params.hpp"

namespace msmbias {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct SensitivityConfig {
  ObservedSummary obs;
  Interval sensitivity{0.90, 0.98};
  Interval specificity{0.90, 0.98};
  // Confounder-outcome effect; a point interval for a fixed value.
  Interval gamma = Interval::point(0.0);
  int draws = 10000;
  std::uint64_t seed = 1;
  double omega_tolerance = kDefaultOmegaTolerance;
  unsigned workers = 1;
};

void validate(const SensitivityConfig& cfg);

struct SensitivityDraw {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double gamma = 0.0;
  bool feasible = false;
  std::optional<ErrorCode> reason;  // set when infeasible
  InvertedParams latent;
  BiasPair bias;
};

struct Histogram {
  double bin_width = 0.0;
  std::vector<double> edges;  // counts.size() + 1 entries
  std::vector<std::size_t> counts;
};

struct BiasSummary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  Histogram histogram;
};

struct SensitivityReport {
  std::vector<SensitivityDraw> draws;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  double proportion_infeasible = 0.0;
  BiasSummary cm;
  BiasSummary msm;

  // Bias values of feasible draws, in draw order.
  std::vector<double> values(Estimator e) const;
};

// Draws sensitivity and specificity uniformly from their ranges, inverts the
// observables, and evaluates both bias expressions on every feasible draw.
// Throws DomainError(analysis) when no draw is feasible.
SensitivityReport run_sensitivity(const SensitivityConfig& cfg);

// Quantile with linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double prob);
// Freedman-Diaconis binning; a single zero-width bin for constant data.
Histogram freedman_diaconis(const std::vector<double>& values);
BiasSummary summarize_bias(const std::vector<double>& values);

// Observed ATE shifted by the bias summaries. Heuristic: it ignores the
// sampling uncertainty of the observed estimate.
struct AdjustedEstimate {
  double ate_hat = 0.0;
  double mean_adjusted = 0.0;
  double median_adjusted = 0.0;
  double low = 0.0;   // ate_hat - q3
  double high = 0.0;  // ate_hat - q1
};

AdjustedEstimate adjusted_estimate(double ate_hat, const SensitivityReport& report,
                                   Estimator estimator = Estimator::msm_ipw);

}  // namespace msmbias
