#include <doctest.h>

#include <chrono>
#include <string>
#include <thread>

#include "msmbias/api.hpp"
#include "msmbias/json_io.hpp"

#include <httplib.h>

using namespace msmbias;
using io::json;

namespace {

const std::string kBias =
    R"({"lambda":0.5,"pi0":0.9,"pi1":0.45,"p0":0.05,"p1":0.9,"gamma":2})";
const std::string kSensitivity =
    R"({"observed":{"ell":0.77,"omega":0.42,"pi_star0":0.32,"pi_star1":0.44},)"
    R"("sensitivity_range":[0.9,0.98],"specificity_range":[0.9,0.98],"gamma":-8.96,)"
    R"("draws":300,"seed":2020})";

std::string error_code(const api::ApiResponse& r) {
  return json::parse(r.body)["error"]["code"].get<std::string>();
}

}  // namespace

TEST_CASE("handlers") {
  SUBCASE("health") {
    const auto r = api::handle_health();
    CHECK(r.status == 200);
    CHECK(json::parse(r.body)["status"] == "ok");
  }
  SUBCASE("bias") {
    const auto r = api::handle_bias(kBias);
    REQUIRE(r.status == 200);
    const auto j = json::parse(r.body);
    CHECK(j["schema_version"] == 1);
    CHECK(j["bias_msm"].get<double>() == -0.41800000000000026);
  }
  SUBCASE("malformed body is 400") {
    const auto r = api::handle_bias("{\"lambda\": ");
    CHECK(r.status == 400);
    CHECK(error_code(r) == "parse");
    CHECK(api::handle_bias(R"({"lambda":0.5})").status == 400);
    CHECK(api::handle_bias(R"([1,2])").status == 400);
  }
  SUBCASE("domain errors are 422") {
    auto r = api::handle_bias(
        R"({"lambda":0.5,"pi0":0.9,"pi1":1,"p0":0.05,"p1":0.9,"gamma":2})");
    CHECK(r.status == 422);
    CHECK(error_code(r) == "non_positivity");
    r = api::handle_invert(
        R"({"observed":{"ell":0.77,"omega":0.42,"pi_star0":0.32,"pi_star1":0.44},"p0":0.3,"p1":0.3})");
    CHECK(r.status == 422);
    CHECK(error_code(r) == "degenerate_assumption");
    r = api::handle_bias(
        R"({"lambda":1.5,"pi0":0.9,"pi1":0.4,"p0":0.05,"p1":0.9,"gamma":2})");
    CHECK(r.status == 422);
    CHECK(error_code(r) == "invalid_parameter");
  }
  SUBCASE("curve") {
    const auto r = api::handle_curve(
        R"({"params":{"lambda":0.5,"pi0":0.5,"pi1":0.75,"p0":0.05,"p1":0.9,"gamma":2},)"
        R"("parameter":"pi1","grid":[0,0.5,1]})");
    REQUIRE(r.status == 200);
    const auto j = json::parse(r.body);
    CHECK(j["points"][0]["undefined_reason"] == "non_positivity");
    CHECK(j["points"][1]["bias_msm"] == 0.0);
  }
  SUBCASE("sensitivity is byte reproducible") {
    api::ApiConfig cfg;
    const auto a = api::handle_sensitivity(kSensitivity, cfg);
    const auto b = api::handle_sensitivity(kSensitivity, cfg);
    REQUIRE(a.status == 200);
    CHECK(a.body == b.body);
    CHECK(json::parse(a.body)["msm"]["values"].size() == 300);
  }
  SUBCASE("draw cap") {
    api::ApiConfig cfg;
    cfg.max_draws = 100;
    const auto r = api::handle_sensitivity(kSensitivity, cfg);
    CHECK(r.status == 422);
    CHECK(error_code(r) == "invalid_parameter");
  }
}

TEST_CASE("HTTP server") {
  api::ApiConfig cfg;
  cfg.port = 0;
  api::Server server(cfg);
  const int port = server.bind();
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(std::chrono::seconds(2));
  httplib::Result health;
  for (int i = 0; i < 100; ++i) {
    health = client.Get("/health");
    if (health) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  const auto bias = client.Post("/api/bias", kBias, "application/json");
  REQUIRE(bias);
  CHECK(bias->status == 200);
  CHECK(bias->body == api::handle_bias(kBias).body);

  const auto bad = client.Post("/api/bias", "nope", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const auto sens = client.Post("/api/sensitivity", kSensitivity, "application/json");
  REQUIRE(sens);
  CHECK(sens->status == 200);
  CHECK(sens->body == api::handle_sensitivity(kSensitivity, cfg).body);

  const auto preflight = client.Options("/api/bias");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);

  const auto missing = client.Get("/api/nothing");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  loop.join();
}
