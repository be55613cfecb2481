#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace msmbias {

struct Record {
  std::uint8_t l = 0;
  std::uint8_t lstar = 0;
  std::uint8_t a = 0;
  double y = 0.0;
};

struct DatasetInfo {
  std::uint64_t seed = 0;
  std::string scenario_id;
  int setting = 2;
  std::uint64_t replicate = 0;
};

struct Dataset {
  std::vector<Record> records;
  DatasetInfo info;

  std::size_t size() const noexcept { return records.size(); }
};

// Throws DomainError(invalid_parameter) for an empty dataset or non-binary fields.
void validate(const Dataset& d);

enum class Estimator { conditional, msm_ipw };
enum class Adjustment { none, l, lstar };

std::string_view to_string(Estimator e) noexcept;
std::string_view to_string(Adjustment a) noexcept;

struct WeightDiagnostics {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double weighted_mean_treatment = 0.0;
};

struct FitResult {
  double ate_hat = 0.0;
  double model_se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Estimator estimator = Estimator::conditional;
  Adjustment adjustment = Adjustment::none;
  std::optional<WeightDiagnostics> weights;
};

// Two-sided 95% normal quantile used for every Wald interval.
inline constexpr double kWaldZ = 1.959964;

// OLS of y on (1, a[, adjustment]) with the classical homoskedastic SE.
FitResult fit_conditional(const Dataset& d, Adjustment adjustment);

// Weighted least squares of y on (1, a) with weights 1 / P^(A | V), where
// P^ is the empirical frequency within each level of V. SE is the HC0
// sandwich with the weights treated as known.
FitResult fit_msm_ipw(const Dataset& d, Adjustment adjustment);

// HC0 sandwich (X'WX)^-1 (sum w_i^2 e_i^2 x_i x_i') (X'WX)^-1, square root
// of the `coefficient` diagonal entry.
double sandwich_se(const Eigen::MatrixXd& design, std::span<const double> weights,
                   std::span<const double> residuals, Eigen::Index coefficient);

}  // namespace msmbias
