#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msmbias/estimators.hpp"
#include "msmbias/oracle.hpp"
#include "msmbias/params.hpp"

namespace msmbias {

using oracle::TreatmentSetting;

struct Scenario {
  std::string id;
  LatentParams params;
  int n = 1000;
  int reps = 5000;
  TreatmentSetting setting = TreatmentSetting::from_l;
  std::uint64_t seed = 20200101;
};

// reps >= 2, n >= 2, valid params.
void validate(const Scenario& s);

// The five reference scenarios (n = 1000, 5000 reps).
std::vector<Scenario> builtin_scenarios();
// Throws DomainError(invalid_parameter) if no scenario has this id.
Scenario find_scenario(const std::vector<Scenario>& catalog, const std::string& id);

// Key/value catalog format, one `[scenario <id>]` section per scenario:
//
//   [scenario 1]
//   lambda = 0.5
//   pi0 = 0.9
//   ...
//
// Unknown keys and malformed values raise DomainError(parse) with the line.
std::vector<Scenario> parse_scenarios(std::istream& in, const std::string& source = "<input>");
std::vector<Scenario> load_scenarios(const std::string& path);
void write_scenarios(std::ostream& out, const std::vector<Scenario>& scenarios);

// Deterministic in (s.seed, s.id, replicate).
Dataset generate_dataset(const Scenario& s, std::uint64_t replicate);

struct Measure {
  double value = 0.0;
  double mcse = 0.0;
};

struct PerformanceRow {
  std::string scenario_id;
  Estimator estimator = Estimator::conditional;
  int n = 0;
  int setting = 2;
  int reps = 0;
  int failed = 0;
  double beta = 1.0;
  std::optional<double> bias_formula;
  Measure bias, mse, coverage, emp_se, model_se;
};

struct SimulationReport {
  std::vector<PerformanceRow> rows;
  std::vector<std::string> warnings;

  const PerformanceRow& row(const std::string& scenario_id, Estimator e, int n) const;
};

struct ReplicateEstimate {
  bool ok = false;
  double estimate = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Order-insensitive summary of per-replicate estimates against the truth.
PerformanceRow summarize(const std::vector<ReplicateEstimate>& estimates, double beta);

struct RunOptions {
  unsigned workers = 0;  // 0 = hardware concurrency
  Adjustment adjustment = Adjustment::lstar;
};

// Fits both estimators on every replicate; rows for cm then msm.
SimulationReport run_scenario(const Scenario& s, const RunOptions& options = {});

void merge(SimulationReport& into, SimulationReport&& from);

void write_report_csv(std::ostream& out, const SimulationReport& report);

}  // namespace msmbias
