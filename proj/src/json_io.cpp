#include "msmbias/json_io.hpp"

#include <initializer_list>
#include <ostream>
#include <cmath>
#include <string_view>

#include "msmbias/format.hpp"

namespace msmbias::io {

namespace {

DomainError shape_error(const std::string& msg) { return DomainError(ErrorCode::parse, msg); }

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw shape_error(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw shape_error(std::string("unknown field '") + key + "' in " + what);
  }
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw shape_error(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw shape_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Interval interval(const json& j, const char* key) {
  if (!j.contains(key)) throw shape_error(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return Interval::point(v.get<double>());
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw shape_error(std::string("field '") + key + "' must be a number or a [lo, hi] pair");
}

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json pair_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

json envelope(json input) {
  json out = json::object();
  out["schema_version"] = kSchemaVersion;
  out["input"] = std::move(input);
  return out;
}

}  // namespace

LatentParams latent_params_from_json(const json& j) {
  require_object(j, "params");
  reject_unknown(j, {"lambda", "pi0", "pi1", "p0", "p1", "alpha", "beta", "gamma", "sigma"},
                 "params");
  LatentParams p;
  p.lambda = number(j, "lambda");
  p.pi0 = number(j, "pi0");
  p.pi1 = number(j, "pi1");
  p.p0 = number(j, "p0");
  p.p1 = number(j, "p1");
  p.gamma = number(j, "gamma");
  p.alpha = number_or(j, "alpha", 1.0);
  p.beta = number_or(j, "beta", 1.0);
  p.sigma = number_or(j, "sigma", 1.0);
  return p;
}

ObservedSummary observed_from_json(const json& j) {
  require_object(j, "observed summary");
  reject_unknown(j, {"ell", "omega", "pi_star0", "pi_star1"}, "observed summary");
  return {number(j, "ell"), number(j, "omega"), number(j, "pi_star0"), number(j, "pi_star1")};
}

SensitivityConfig sensitivity_config_from_json(const json& j) {
  require_object(j, "sensitivity config");
  reject_unknown(j,
                 {"observed", "sensitivity_range", "specificity_range", "gamma", "draws", "seed",
                  "omega_tolerance", "workers"},
                 "sensitivity config");
  SensitivityConfig cfg;
  if (!j.contains("observed")) throw shape_error("missing field 'observed'");
  cfg.obs = observed_from_json(j.at("observed"));
  cfg.sensitivity = interval(j, "sensitivity_range");
  cfg.specificity = interval(j, "specificity_range");
  cfg.gamma = interval(j, "gamma");
  if (j.contains("draws")) {
    if (!j["draws"].is_number_integer()) throw shape_error("field 'draws' must be an integer");
    cfg.draws = j["draws"].get<int>();
  }
  if (j.contains("seed")) {
    if (!non_negative_integer(j["seed"])) {
      throw shape_error("field 'seed' must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  cfg.omega_tolerance = number_or(j, "omega_tolerance", kDefaultOmegaTolerance);
  if (j.contains("workers")) {
    if (!non_negative_integer(j["workers"])) throw shape_error("field 'workers' must be a count");
    cfg.workers = j["workers"].get<unsigned>();
  }
  return cfg;
}

json to_json(const LatentParams& p) {
  return {{"lambda", p.lambda}, {"pi0", p.pi0},     {"pi1", p.pi1},
          {"p0", p.p0},         {"p1", p.p1},       {"alpha", p.alpha},
          {"beta", p.beta},     {"gamma", p.gamma}, {"sigma", p.sigma}};
}

json to_json(const ObservedSummary& obs) {
  return {{"ell", obs.ell},
          {"omega", obs.omega},
          {"pi_star0", obs.pi_star0},
          {"pi_star1", obs.pi_star1}};
}

json to_json(const SensitivityConfig& cfg) {
  return {{"observed", to_json(cfg.obs)},
          {"sensitivity_range", pair_json(cfg.sensitivity)},
          {"specificity_range", pair_json(cfg.specificity)},
          {"gamma", pair_json(cfg.gamma)},
          {"draws", cfg.draws},
          {"seed", cfg.seed},
          {"omega_tolerance", cfg.omega_tolerance}};
}

CurveRequest curve_request_from_json(const json& j) {
  require_object(j, "curve request");
  reject_unknown(j, {"params", "parameter", "grid", "from", "to", "points"}, "curve request");
  CurveRequest req;
  if (!j.contains("params")) throw shape_error("missing field 'params'");
  req.params = latent_params_from_json(j.at("params"));
  if (!j.contains("parameter") || !j["parameter"].is_string()) {
    throw shape_error("field 'parameter' must be a string");
  }
  req.parameter = parse_sweep_parameter(j["parameter"].get<std::string>());
  if (j.contains("grid")) {
    if (!j["grid"].is_array()) throw shape_error("field 'grid' must be an array of numbers");
    for (const auto& v : j["grid"]) {
      if (!v.is_number()) throw shape_error("field 'grid' must be an array of numbers");
      req.grid.push_back(v.get<double>());
    }
  } else {
    if (!j.contains("points") || !j["points"].is_number_integer()) {
      throw shape_error("give either 'grid' or 'from', 'to' and integer 'points'");
    }
    req.grid = linear_grid(number(j, "from"), number(j, "to"), j["points"].get<int>());
  }
  return req;
}

InvertRequest invert_request_from_json(const json& j) {
  require_object(j, "invert request");
  reject_unknown(j, {"observed", "p0", "p1", "omega_tolerance"}, "invert request");
  InvertRequest req;
  if (!j.contains("observed")) throw shape_error("missing field 'observed'");
  req.obs = observed_from_json(j.at("observed"));
  req.p0 = number(j, "p0");
  req.p1 = number(j, "p1");
  req.omega_tolerance = number_or(j, "omega_tolerance", kDefaultOmegaTolerance);
  return req;
}

json bias_response(const LatentParams& p) {
  validate(p);
  const BiasPair b = bias_pair(p);
  json out = envelope(to_json(p));
  out["bias_cm"] = b.bias_cm;
  out["bias_msm"] = b.bias_msm;
  out["observables"] = to_json(implied_observables(p));
  return out;
}

json curve_response(const CurveRequest& req) {
  const auto points = bias_curve(req.params, req.parameter, req.grid);
  json input = {{"params", to_json(req.params)},
                {"parameter", std::string(to_string(req.parameter))},
                {"grid", req.grid}};
  json out = envelope(std::move(input));
  json series = json::array();
  for (const auto& pt : points) {
    json row = {{"x", pt.x}};
    row["bias_cm"] = pt.bias ? json(pt.bias->bias_cm) : json(nullptr);
    row["bias_msm"] = pt.bias ? json(pt.bias->bias_msm) : json(nullptr);
    row["undefined_reason"] =
        pt.undefined_reason ? json(std::string(to_string(*pt.undefined_reason))) : json(nullptr);
    series.push_back(std::move(row));
  }
  out["points"] = std::move(series);
  return out;
}

json invert_response(const InvertRequest& req) {
  const InvertedParams inv = invert_observables(req.obs, req.p0, req.p1, req.omega_tolerance);
  json input = {{"observed", to_json(req.obs)},
                {"p0", req.p0},
                {"p1", req.p1},
                {"omega_tolerance", req.omega_tolerance}};
  json out = envelope(std::move(input));
  out["lambda"] = inv.lambda;
  out["pi0"] = inv.pi0;
  out["pi1"] = inv.pi1;
  return out;
}

json to_json(const BiasSummary& s) {
  json hist = {{"bin_width", s.histogram.bin_width},
               {"edges", s.histogram.edges},
               {"counts", s.histogram.counts}};
  return {{"mean", s.mean},
          {"median", s.median},
          {"q1", s.q1},
          {"q3", s.q3},
          {"histogram", std::move(hist)}};
}

json sensitivity_response(const SensitivityConfig& cfg, const SensitivityReport& report) {
  json out = envelope(to_json(cfg));
  out["feasible"] = report.feasible;
  out["infeasible"] = report.infeasible;
  out["proportion_infeasible"] = report.proportion_infeasible;
  json cm = to_json(report.cm);
  cm["values"] = report.values(Estimator::conditional);
  json msm = to_json(report.msm);
  msm["values"] = report.values(Estimator::msm_ipw);
  out["cm"] = std::move(cm);
  out["msm"] = std::move(msm);
  return out;
}

json error_response(ErrorCode code, const std::string& message) {
  return {{"schema_version", kSchemaVersion},
          {"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

json to_json(const SimulationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = {{"estimator", std::string(to_string(r.estimator))},
                {"scenario", r.scenario_id},
                {"n", r.n},
                {"setting", r.setting},
                {"reps", r.reps},
                {"failed", r.failed},
                {"beta", r.beta}};
    row["bias_formula"] = r.bias_formula ? json(*r.bias_formula) : json(nullptr);
    auto measure = [](const Measure& m) {
      return json{{"value", nullable(m.value)}, {"mcse", nullable(m.mcse)}};
    };
    row["bias"] = measure(r.bias);
    row["mse"] = measure(r.mse);
    row["coverage"] = measure(r.coverage);
    row["emp_se"] = measure(r.emp_se);
    row["model_se"] = measure(r.model_se);
    rows.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion}, {"rows", std::move(rows)},
          {"warnings", report.warnings}};
}

void write_draws_csv(std::ostream& out, const SensitivityReport& report) {
  out << "draw,sensitivity,specificity,p0,p1,gamma,feasible,reason,lambda,pi0,pi1,bias_cm,"
         "bias_msm\n";
  for (std::size_t i = 0; i < report.draws.size(); ++i) {
    const auto& d = report.draws[i];
    out << i << ',' << format_double(d.sensitivity) << ',' << format_double(d.specificity) << ','
        << format_double(d.p0) << ',' << format_double(d.p1) << ',' << format_double(d.gamma)
        << ',' << (d.feasible ? 1 : 0) << ',' << (d.reason ? to_string(*d.reason) : "") << ',';
    if (d.feasible) {
      out << format_double(d.latent.lambda) << ',' << format_double(d.latent.pi0) << ','
          << format_double(d.latent.pi1) << ',' << format_double(d.bias.bias_cm) << ','
          << format_double(d.bias.bias_msm) << '\n';
    } else {
      out << ",,,,\n";
    }
  }
}

}  // namespace msmbias::io
