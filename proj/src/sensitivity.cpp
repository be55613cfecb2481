#include "msmbias/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "msmbias/format.hpp"
#include "msmbias/parallel.hpp"
#include "msmbias/rng.hpp"

namespace msmbias {

namespace {

constexpr std::size_t kMaxHistogramBins = 10000;

void require_interval(const Interval& iv, const char* name, bool probability) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
    throw DomainError(ErrorCode::invalid_parameter,
                      std::string(name) + " range must be finite with lo <= hi");
  }
  if (probability && !(iv.lo > 0.0 && iv.hi <= 1.0)) {
    throw DomainError(ErrorCode::invalid_parameter,
                      std::string(name) + " range must lie within (0, 1]");
  }
}

double draw_in(const Interval& iv, rng::Engine& eng) {
  if (iv.lo == iv.hi) {
    rng::uniform01(eng);  // keep the stream layout independent of the range
    return iv.lo;
  }
  return iv.lo + (iv.hi - iv.lo) * rng::uniform01(eng);
}

}  // namespace

void validate(const SensitivityConfig& cfg) {
  validate(cfg.obs);
  require_interval(cfg.sensitivity, "sensitivity", true);
  require_interval(cfg.specificity, "specificity", true);
  require_interval(cfg.gamma, "gamma", false);
  if (cfg.draws < 1) throw DomainError(ErrorCode::invalid_parameter, "draws must be >= 1");
  if (!(cfg.omega_tolerance >= 0.0)) {
    throw DomainError(ErrorCode::invalid_parameter, "omega tolerance must be non-negative");
  }
}

std::vector<double> SensitivityReport::values(Estimator e) const {
  std::vector<double> out;
  out.reserve(feasible);
  for (const auto& d : draws) {
    if (d.feasible) out.push_back(e == Estimator::conditional ? d.bias.bias_cm : d.bias.bias_msm);
  }
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw DomainError(ErrorCode::analysis, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Histogram freedman_diaconis(const std::vector<double>& values) {
  Histogram h;
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn;
  const double hi = *mx;
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
  if (hi == lo || !(width > 0.0)) {
    h.bin_width = 0.0;
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  bins = std::clamp<std::size_t>(bins, 1, kMaxHistogramBins);
  width = (hi - lo) / static_cast<double>(bins);
  h.bin_width = width;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(idx, bins - 1)] += 1;
  }
  return h;
}

BiasSummary summarize_bias(const std::vector<double>& values) {
  if (values.empty()) throw DomainError(ErrorCode::analysis, "no feasible draws to summarize");
  BiasSummary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  s.histogram = freedman_diaconis(values);
  return s;
}

SensitivityReport run_sensitivity(const SensitivityConfig& cfg) {
  validate(cfg);
  const double omega_implied = cfg.obs.pi_star0 * (1.0 - cfg.obs.ell) + cfg.obs.pi_star1 * cfg.obs.ell;
  if (std::abs(cfg.obs.omega - omega_implied) > cfg.omega_tolerance) {
    throw DomainError(ErrorCode::inconsistent_observables,
                      "omega = " + format_double(cfg.obs.omega) +
                          " disagrees with pi_star0 (1 - ell) + pi_star1 ell = " +
                          format_double(omega_implied));
  }
  SensitivityReport report;
  report.draws.resize(static_cast<std::size_t>(cfg.draws));
  const std::uint64_t stream = rng::fnv1a("sensitivity");
  parallel_for(report.draws.size(), cfg.workers, [&](std::size_t i) {
    rng::Engine eng(rng::substream_seed(cfg.seed, stream, i));
    SensitivityDraw& d = report.draws[i];
    d.sensitivity = draw_in(cfg.sensitivity, eng);
    d.specificity = draw_in(cfg.specificity, eng);
    d.gamma = draw_in(cfg.gamma, eng);
    d.p1 = d.sensitivity;
    d.p0 = 1.0 - d.specificity;
    try {
      const LatentParams p = latent_from_observables(cfg.obs, d.p0, d.p1, d.gamma, 1.0, 1.0, 1.0,
                                                     cfg.omega_tolerance);
      d.latent = {p.lambda, p.pi0, p.pi1};
      d.bias = bias_pair(p);
      d.feasible = true;
    } catch (const DomainError& e) {
      d.feasible = false;
      d.reason = e.code();
    }
  });
  for (const auto& d : report.draws) (d.feasible ? report.feasible : report.infeasible) += 1;
  report.proportion_infeasible =
      static_cast<double>(report.infeasible) / static_cast<double>(report.draws.size());
  if (report.feasible == 0) {
    throw DomainError(ErrorCode::analysis,
                      "all " + std::to_string(cfg.draws) +
                          " draws are infeasible: the sensitivity/specificity ranges are "
                          "incompatible with the observed summaries");
  }
  report.cm = summarize_bias(report.values(Estimator::conditional));
  report.msm = summarize_bias(report.values(Estimator::msm_ipw));
  return report;
}

AdjustedEstimate adjusted_estimate(double ate_hat, const SensitivityReport& report,
                                   Estimator estimator) {
  if (report.feasible == 0) {
    throw DomainError(ErrorCode::analysis, "no feasible draws to adjust with");
  }
  const BiasSummary& s = estimator == Estimator::conditional ? report.cm : report.msm;
  AdjustedEstimate out;
  out.ate_hat = ate_hat;
  out.mean_adjusted = ate_hat - s.mean;
  out.median_adjusted = ate_hat - s.median;
  out.low = ate_hat - s.q3;
  out.high = ate_hat - s.q1;
  return out;
}

}  // namespace msmbias
