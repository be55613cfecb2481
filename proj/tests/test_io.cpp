#include <doctest.h>

#include <sstream>
#include <string>

#include "msmbias/format.hpp"
#include "msmbias/json_io.hpp"

using namespace msmbias;
using io::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    return e.code();
  }
  FAIL("expected a DomainError");
  return ErrorCode::invalid_parameter;
}

const json kScenario1 = {{"lambda", 0.5}, {"pi0", 0.9}, {"pi1", 0.45},
                         {"p0", 0.05},    {"p1", 0.9},  {"gamma", 2}};

}  // namespace

TEST_CASE("number formatting") {
  for (double x : {0.1, 1.0 / 3.0, -0.41800000000000026, 1e-300, 123456789.125}) {
    CHECK(parse_double(format_double(x)).value() == x);
  }
  CHECK(format_double(2.0) == "2");
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("parameter decoding") {
  SUBCASE("defaults for the outcome model") {
    const auto p = io::latent_params_from_json(kScenario1);
    CHECK(p.pi1 == 0.45);
    CHECK(p.alpha == 1.0);
    CHECK(p.beta == 1.0);
    CHECK(p.sigma == 1.0);
  }
  SUBCASE("shape errors are parse errors") {
    auto j = kScenario1;
    j.erase("gamma");
    CHECK(code_of([&] { io::latent_params_from_json(j); }) == ErrorCode::parse);
    j = kScenario1;
    j["pi0"] = "0.9";
    CHECK(code_of([&] { io::latent_params_from_json(j); }) == ErrorCode::parse);
    j = kScenario1;
    j["delta"] = 1;
    CHECK(code_of([&] { io::latent_params_from_json(j); }) == ErrorCode::parse);
    CHECK(code_of([&] { io::latent_params_from_json(json::array()); }) == ErrorCode::parse);
  }
  SUBCASE("value errors surface from the domain layer") {
    auto j = kScenario1;
    j["pi1"] = 1.0;
    const auto p = io::latent_params_from_json(j);
    CHECK(code_of([&] { io::bias_response(p); }) == ErrorCode::non_positivity);
  }
}

TEST_CASE("response documents") {
  SUBCASE("bias") {
    const auto out = io::bias_response(io::latent_params_from_json(kScenario1));
    CHECK(out["schema_version"] == 1);
    CHECK(out["input"]["pi1"] == 0.45);
    CHECK(std::abs(out["bias_msm"].get<double>() - (-0.418)) < 1e-12);
    CHECK(std::abs(out["observables"]["ell"].get<double>() - 0.475) < 1e-12);
    const auto again = json::parse(out.dump());
    CHECK(again["bias_cm"].get<double>() == out["bias_cm"].get<double>());
  }
  SUBCASE("curve with undefined points") {
    const json req = {{"params", kScenario1}, {"parameter", "pi1"}, {"grid", {0.0, 0.5}}};
    const auto out = io::curve_response(io::curve_request_from_json(req));
    REQUIRE(out["points"].size() == 2);
    CHECK(out["points"][0]["bias_msm"].is_null());
    CHECK(out["points"][0]["undefined_reason"] == "non_positivity");
    CHECK(out["points"][1]["undefined_reason"].is_null());
  }
  SUBCASE("curve from a range") {
    const json req = {{"params", kScenario1}, {"parameter", "gamma"},
                      {"from", -1},           {"to", 1},
                      {"points", 5}};
    const auto r = io::curve_request_from_json(req);
    REQUIRE(r.grid.size() == 5);
    CHECK(r.grid[2] == 0.0);
    const json bad = {{"params", kScenario1}, {"parameter", "gamma"}};
    CHECK(code_of([&] { io::curve_request_from_json(bad); }) == ErrorCode::parse);
  }
  SUBCASE("invert") {
    const json req = {{"observed", {{"ell", 0.77}, {"omega", 0.42}, {"pi_star0", 0.32},
                                    {"pi_star1", 0.44}}},
                      {"p0", 0.05},
                      {"p1", 0.95}};
    const auto out = io::invert_response(io::invert_request_from_json(req));
    CHECK(std::abs(out["lambda"].get<double>() - 0.8) < 1e-12);
    CHECK(out["input"]["omega_tolerance"] == kDefaultOmegaTolerance);
  }
  SUBCASE("sensitivity config round trip") {
    const json j = {{"observed", {{"ell", 0.77}, {"omega", 0.42}, {"pi_star0", 0.32},
                                  {"pi_star1", 0.44}}},
                    {"sensitivity_range", {0.9, 0.98}},
                    {"specificity_range", {0.9, 0.98}},
                    {"gamma", {-9, -8}},
                    {"draws", 30},
                    {"seed", 4}};
    const auto cfg = io::sensitivity_config_from_json(j);
    CHECK(cfg.gamma.lo == -9);
    CHECK(cfg.gamma.hi == -8);
    const auto back = io::sensitivity_config_from_json(io::to_json(cfg));
    CHECK(back.seed == 4);
    CHECK(back.draws == 30);
    const auto rep = run_sensitivity(cfg);
    const auto out = io::sensitivity_response(cfg, rep);
    CHECK(out["msm"]["values"].size() == 30);
    CHECK(out["feasible"] == 30);
    std::ostringstream csv;
    io::write_draws_csv(csv, rep);
    std::size_t lines = 0;
    for (char c : csv.str()) lines += c == '\n';
    CHECK(lines == 31);
  }
  SUBCASE("error envelope") {
    const auto out = io::error_response(ErrorCode::positivity, "empty stratum");
    CHECK(out["error"]["code"] == "positivity");
    CHECK(out["error"]["message"] == "empty stratum");
  }
  SUBCASE("simulation report") {
    auto s = find_scenario(builtin_scenarios(), "0");
    s.n = 50;
    s.reps = 3;
    const auto out = io::to_json(run_scenario(s));
    REQUIRE(out["rows"].size() == 2);
    CHECK(out["rows"][0]["estimator"] == "cm");
    CHECK(out["rows"][1]["bias_formula"] == 0.0);
    CHECK(out["rows"][1]["coverage"]["value"].is_number());
  }
}
