#include <doctest.h>

#include <cmath>

#include "msmbias/bias.hpp"
#include "msmbias/oracle.hpp"
#include "test_support.hpp"

using namespace msmbias;
using namespace msmbias::oracle;
using msmbias::testing::ParamGenerator;
using msmbias::testing::scenario_params;

TEST_CASE("cell enumeration") {
  SUBCASE("probabilities sum to one") {
    ParamGenerator gen(1);
    for (int i = 0; i < 200; ++i) {
      const auto p = gen();
      for (auto s : {TreatmentSetting::from_l, TreatmentSetting::from_lstar})
        REQUIRE(std::abs(enumerate_cells(p, s).total() - 1.0) < 1e-14);
    }
  }
  SUBCASE("cell layout and conditional mean") {
    const auto p = scenario_params(1);
    const auto cells = enumerate_cells(p);
    const auto& c = cells.cells[1 * 4 + 0 * 2 + 1];
    CHECK(c.l == 1);
    CHECK(c.lstar == 0);
    CHECK(c.a == 1);
    CHECK(c.ey == p.alpha + p.beta + p.gamma);
    CHECK(std::abs(c.prob - p.lambda * (1 - p.p1) * p.pi1) < 1e-15);
  }
  SUBCASE("marginals match the implied observables") {
    const auto p = scenario_params(2);
    const auto cells = enumerate_cells(p);
    const auto obs = implied_observables(p);
    CHECK(std::abs(cells.mass([](const Cell& c) { return c.lstar == 1; }) - obs.ell) < 1e-14);
    CHECK(std::abs(cells.mass([](const Cell& c) { return c.a == 1; }) - obs.omega) < 1e-14);
  }
  SUBCASE("setting 1 assigns treatment from L*") {
    const auto p = scenario_params(3);
    const auto cells = enumerate_cells(p, TreatmentSetting::from_lstar);
    const double l1 = cells.mass([](const Cell& c) { return c.lstar == 1; });
    const double a1l1 = cells.mass([](const Cell& c) { return c.lstar == 1 && c.a == 1; });
    CHECK(std::abs(a1l1 / l1 - p.pi1) < 1e-14);
  }
}

TEST_CASE("population regressions") {
  SUBCASE("adjusting for the true confounder recovers beta") {
    ParamGenerator gen(2);
    for (int i = 0; i < 200; ++i) {
      const auto p = gen();
      const auto cells = enumerate_cells(p);
      const auto ols = population_ols(cells, {Confounder::l, false});
      REQUIRE(std::abs(ols[1] - p.beta) < 1e-10);
      REQUIRE(std::abs(ols[2] - p.gamma) < 1e-10);
      REQUIRE(std::abs(population_ipw_slope(cells, Confounder::l) - p.beta) < 1e-10);
    }
  }
  SUBCASE("setting 1 with L* weights is unbiased") {
    ParamGenerator gen(3);
    for (int i = 0; i < 200; ++i) {
      const auto p = gen();
      const auto cells = enumerate_cells(p, TreatmentSetting::from_lstar);
      REQUIRE(std::abs(population_ipw_slope(cells, Confounder::lstar) - p.beta) < 1e-10);
    }
  }
  SUBCASE("weighted mean of treatment is one half") {
    const auto ipw = population_ipw(enumerate_cells(scenario_params(4)), Confounder::lstar);
    CHECK(std::abs(ipw.weighted_mean_a - 0.5) < 1e-12);
    CHECK(std::abs(ipw.weight_total - 2.0) < 1e-12);
  }
  SUBCASE("no confounder gives the crude difference") {
    const auto p = scenario_params(1);
    const auto cells = enumerate_cells(p);
    const auto ols = population_ols(cells, {Confounder::none, false});
    REQUIRE(ols.size() == 2);
    const double pa1 = cells.mass([](const Cell& c) { return c.a == 1; });
    double ey1 = 0, ey0 = 0;
    for (const auto& c : cells.cells) (c.a ? ey1 : ey0) += c.prob * c.ey;
    CHECK(std::abs(ols[1] - (ey1 / pa1 - ey0 / (1 - pa1))) < 1e-12);
  }
  SUBCASE("non-positivity") {
    auto p = scenario_params(1);
    p.pi1 = 1.0;
    p.pi0 = 1.0;
    try {
      population_ipw(enumerate_cells(p), Confounder::lstar);
      FAIL("expected non-positivity");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::non_positivity);
    }
  }
}

TEST_CASE("pivoted solve") {
  SUBCASE("needs pivoting") {
    const auto x = solve_pivoted({{0, 1}, {2, 3}}, {1, 8});
    CHECK(std::abs(x[0] - 2.5) < 1e-15);
    CHECK(std::abs(x[1] - 1.0) < 1e-15);
  }
  SUBCASE("singular") {
    try {
      solve_pivoted({{1, 2}, {2, 4}}, {1, 2});
      FAIL("expected singular design");
    } catch (const DomainError& e) {
      CHECK(e.code() == ErrorCode::singular_design);
    }
  }
}

TEST_CASE("closed forms agree with the oracle") {
  for (int s = 0; s <= 4; ++s) {
    CAPTURE(s);
    const auto p = scenario_params(s);
    const auto cells = enumerate_cells(p);
    const auto ols = population_ols(cells, {Confounder::lstar, false});
    CHECK(std::abs(bias_conditional(p) - (ols[1] - p.beta)) < 1e-10);
    CHECK(std::abs(bias_msm(p) - (population_ipw_slope(cells, Confounder::lstar) - p.beta)) <
          1e-10);
  }
}
