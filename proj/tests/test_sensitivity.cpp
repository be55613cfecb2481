#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "msmbias/json_io.hpp"
#include "msmbias/sensitivity.hpp"

using namespace msmbias;

namespace {

const ObservedSummary kNhanes{0.77, 0.42, 0.32, 0.44};

SensitivityConfig nhanes(int draws = 2000) {
  SensitivityConfig cfg;
  cfg.obs = kNhanes;
  cfg.gamma = Interval::point(-8.96);
  cfg.draws = draws;
  cfg.seed = 2020;
  return cfg;
}

}  // namespace

TEST_CASE("quantiles and histograms") {
  SUBCASE("type 7 quantiles") {
    const std::vector<double> v{4, 1, 3, 2};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile({7.0}, 0.3) == 7.0);
    CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
  }
  SUBCASE("Freedman-Diaconis") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(i / 999.0);
    const auto h = freedman_diaconis(v);
    // IQR 0.5, width 2 * 0.5 / 10 = 0.1
    CHECK(h.counts.size() == 10);
    CHECK(h.bin_width == doctest::Approx(0.1));
    CHECK(h.edges.front() == 0.0);
    CHECK(h.edges.back() == 1.0);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == v.size());
  }
  SUBCASE("constant sample is one zero-width bin") {
    const auto h = freedman_diaconis({0.0, 0.0, 0.0});
    CHECK(h.bin_width == 0.0);
    REQUIRE(h.counts.size() == 1);
    CHECK(h.counts[0] == 3);
  }
}

TEST_CASE("sensitivity analysis") {
  SUBCASE("perfect classification gives zero bias") {
    SensitivityConfig cfg;
    cfg.obs = kNhanes;
    cfg.sensitivity = Interval::point(1.0);
    cfg.specificity = Interval::point(1.0);
    cfg.gamma = {-5.0, 5.0};
    cfg.draws = 200;
    const auto rep = run_sensitivity(cfg);
    CHECK(rep.feasible == 200);
    for (double v : rep.values(Estimator::msm_ipw)) REQUIRE(v == 0.0);
    for (double v : rep.values(Estimator::conditional)) REQUIRE(v == 0.0);
  }
  SUBCASE("gamma = 0 gives zero bias") {
    auto cfg = nhanes(200);
    cfg.gamma = Interval::point(0.0);
    const auto rep = run_sensitivity(cfg);
    CHECK(rep.msm.mean == 0.0);
    CHECK(rep.cm.q3 == 0.0);
  }
  SUBCASE("deterministic for a seed and any worker count") {
    auto cfg = nhanes(500);
    const auto a = run_sensitivity(cfg);
    cfg.workers = 3;
    const auto b = run_sensitivity(cfg);
    REQUIRE(a.draws.size() == b.draws.size());
    for (std::size_t i = 0; i < a.draws.size(); ++i) {
      REQUIRE(a.draws[i].sensitivity == b.draws[i].sensitivity);
      REQUIRE(a.draws[i].bias.bias_msm == b.draws[i].bias.bias_msm);
    }
    cfg.seed = 2021;
    CHECK(run_sensitivity(cfg).msm.mean != a.msm.mean);
  }
  SUBCASE("draws stay in range and invert back") {
    const auto rep = run_sensitivity(nhanes(500));
    for (const auto& d : rep.draws) {
      REQUIRE(d.sensitivity >= 0.90);
      REQUIRE(d.sensitivity <= 0.98);
      REQUIRE(d.p0 == doctest::Approx(1 - d.specificity));
      REQUIRE(d.feasible);
      LatentParams p{d.latent.lambda, d.latent.pi0, d.latent.pi1, d.p0, d.p1, 1, 1, d.gamma, 1};
      const auto obs = implied_observables(p);
      REQUIRE(std::abs(obs.ell - kNhanes.ell) < 1e-10);
      REQUIRE(std::abs(obs.pi_star0 - kNhanes.pi_star0) < 1e-10);
      REQUIRE(std::abs(obs.pi_star1 - kNhanes.pi_star1) < 1e-10);
    }
  }
  SUBCASE("widening the ranges never lowers the infeasible share") {
    SensitivityConfig cfg;
    cfg.obs = {0.2, 0.4, 0.35, 0.6};
    cfg.obs.omega = cfg.obs.pi_star0 * 0.8 + cfg.obs.pi_star1 * 0.2;
    cfg.gamma = Interval::point(1.0);
    cfg.draws = 4000;
    double last = -1.0;
    for (double lo : {0.9, 0.8, 0.7, 0.6}) {
      cfg.sensitivity = {lo, 0.99};
      cfg.specificity = {lo, 0.99};
      const auto rep = run_sensitivity(cfg);
      CHECK(rep.proportion_infeasible >= last);
      last = rep.proportion_infeasible;
    }
    CHECK(last > 0.0);
  }
  SUBCASE("every draw infeasible") {
    SensitivityConfig cfg;
    cfg.obs = {0.02, 0.5, 0.5, 0.5};
    cfg.sensitivity = {0.9, 0.95};
    cfg.specificity = {0.9, 0.95};
    cfg.draws = 50;
    try {
      run_sensitivity(cfg);
      FAIL("expected analysis error");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::analysis);
    }
  }
  SUBCASE("inconsistent omega is rejected up front") {
    auto cfg = nhanes(10);
    cfg.obs.omega = 0.6;
    try {
      run_sensitivity(cfg);
      FAIL("expected inconsistency");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::inconsistent_observables);
    }
  }
  SUBCASE("invalid configuration") {
    auto cfg = nhanes(10);
    cfg.sensitivity = {0.98, 0.9};
    CHECK_THROWS_AS(run_sensitivity(cfg), DomainError);
    cfg = nhanes(0);
    CHECK_THROWS_AS(run_sensitivity(cfg), DomainError);
  }
}

TEST_CASE("adjusted estimate") {
  SensitivityReport rep;
  rep.feasible = 4;
  rep.msm.mean = -0.31;
  rep.msm.median = -0.30;
  rep.msm.q1 = -0.40;
  rep.msm.q3 = -0.20;
  const auto adj = adjusted_estimate(-3.52, rep);
  CHECK(adj.mean_adjusted == doctest::Approx(-3.21).epsilon(1e-12));
  CHECK(adj.median_adjusted == doctest::Approx(-3.22).epsilon(1e-12));
  CHECK(adj.low == doctest::Approx(-3.32).epsilon(1e-12));
  CHECK(adj.high == doctest::Approx(-3.12).epsilon(1e-12));
  rep.feasible = 0;
  CHECK_THROWS_AS(adjusted_estimate(-3.52, rep), DomainError);
}

TEST_CASE("shipped NHANES configuration") {
  std::ifstream in(std::string(MSMBIAS_DATA_DIR) + "/nhanes_sensitivity.json");
  REQUIRE(in);
  const auto cfg = io::sensitivity_config_from_json(io::json::parse(in));
  CHECK(cfg.gamma.lo == -8.96);
  CHECK(cfg.draws == 10000);
  const auto rep = run_sensitivity(cfg);
  CHECK(rep.infeasible == 0);
  CHECK(std::abs(rep.msm.mean - (-0.31)) <= 0.02);
  CHECK(std::abs(rep.msm.median - (-0.30)) <= 0.02);
  CHECK(std::abs(rep.msm.q1 - (-0.40)) <= 0.03);
  CHECK(std::abs(rep.msm.q3 - (-0.20)) <= 0.03);
}
