#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msmbias/bias.hpp"
#include "msmbias/sensitivity.hpp"
#include "msmbias/simulation.hpp"

namespace msmbias::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Request decoding. Shape errors (missing keys, wrong types, unknown keys)
// raise DomainError(parse); value errors are left to the domain validators.
LatentParams latent_params_from_json(const json& j);
ObservedSummary observed_from_json(const json& j);
SensitivityConfig sensitivity_config_from_json(const json& j);

json to_json(const LatentParams& p);
json to_json(const ObservedSummary& obs);
json to_json(const SensitivityConfig& cfg);

struct CurveRequest {
  LatentParams params;
  SweepParameter parameter = SweepParameter::gamma;
  std::vector<double> grid;
};
CurveRequest curve_request_from_json(const json& j);

struct InvertRequest {
  ObservedSummary obs;
  double p0 = 0.0;
  double p1 = 1.0;
  double omega_tolerance = kDefaultOmegaTolerance;
};
InvertRequest invert_request_from_json(const json& j);

// Response documents: {"schema_version", "input", ...results}. The CLI's
// json output and the HTTP service both emit exactly these.
json bias_response(const LatentParams& p);
json curve_response(const CurveRequest& req);
json invert_response(const InvertRequest& req);
json sensitivity_response(const SensitivityConfig& cfg, const SensitivityReport& report);
json error_response(ErrorCode code, const std::string& message);

json to_json(const SimulationReport& report);
json to_json(const BiasSummary& s);

// Raw draws for external plotting.
void write_draws_csv(std::ostream& out, const SensitivityReport& report);

}  // namespace msmbias::io
