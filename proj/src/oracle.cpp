#include "msmbias/oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "msmbias/errors.hpp"

namespace msmbias::oracle {

namespace {

constexpr double kDeterminantTolerance = 1e-12;

double bern(double prob, int outcome) { return outcome == 1 ? prob : 1.0 - prob; }

int covariate(const Cell& c, Confounder v) {
  switch (v) {
    case Confounder::l: return c.l;
    case Confounder::lstar: return c.lstar;
    case Confounder::none: return 0;
  }
  return 0;
}

}  // namespace

double CellTable::total() const {
  return mass([](const Cell&) { return true; });
}

CellTable enumerate_cells(const LatentParams& p, TreatmentSetting setting) {
  validate(p);
  CellTable t;
  for (int l = 0; l < 2; ++l) {
    for (int lstar = 0; lstar < 2; ++lstar) {
      for (int a = 0; a < 2; ++a) {
        const int driver = setting == TreatmentSetting::from_l ? l : lstar;
        const double pi = driver == 1 ? p.pi1 : p.pi0;
        const double pl = l == 1 ? p.p1 : p.p0;
        Cell& c = t.cells[static_cast<std::size_t>(l * 4 + lstar * 2 + a)];
        c.l = l;
        c.lstar = lstar;
        c.a = a;
        c.prob = bern(p.lambda, l) * bern(pl, lstar) * bern(pi, a);
        c.ey = p.alpha + p.beta * a + p.gamma * l;
      }
    }
  }
  return t;
}

std::vector<double> solve_pivoted(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
      det = -det;
    }
    det *= a[col][col];
    if (a[col][col] == 0.0) break;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  if (!(std::abs(det) >= kDeterminantTolerance)) {
    throw DomainError(ErrorCode::singular_design,
                      "normal equations are singular (|det| = " + std::to_string(std::abs(det)) +
                          ")");
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

std::vector<double> population_ols(const CellTable& cells, Regressors regressors) {
  auto row = [&](const Cell& c) {
    std::vector<double> x{1.0, static_cast<double>(c.a)};
    if (regressors.confounder != Confounder::none) {
      const double v = covariate(c, regressors.confounder);
      x.push_back(v);
      if (regressors.interaction) x.push_back(c.a * v);
    }
    return x;
  };
  const std::size_t k = row(cells.cells[0]).size();
  std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
  std::vector<double> xty(k, 0.0);
  for (const auto& c : cells.cells) {
    if (c.prob == 0.0) continue;
    const auto x = row(c);
    for (std::size_t i = 0; i < k; ++i) {
      xty[i] += c.prob * x[i] * c.ey;
      for (std::size_t j = 0; j < k; ++j) xtx[i][j] += c.prob * x[i] * x[j];
    }
  }
  return solve_pivoted(std::move(xtx), std::move(xty));
}

IpwPopulation population_ipw(const CellTable& cells, Confounder weight_on) {
  if (weight_on == Confounder::none) {
    throw DomainError(ErrorCode::invalid_parameter, "IPW requires a weighting variable");
  }
  // P(A = a | V = v) for each reachable stratum.
  std::array<std::array<double, 2>, 2> cond{};
  for (int v = 0; v < 2; ++v) {
    const double pv = cells.mass([&](const Cell& c) { return covariate(c, weight_on) == v; });
    if (pv == 0.0) continue;
    for (int a = 0; a < 2; ++a) {
      const double pav = cells.mass(
          [&](const Cell& c) { return covariate(c, weight_on) == v && c.a == a; });
      if (pav == 0.0) {
        throw DomainError(ErrorCode::non_positivity,
                          "P(A = " + std::to_string(a) + " | V = " + std::to_string(v) +
                              ") is zero in the population");
      }
      cond[v][a] = pav / pv;
    }
  }
  IpwPopulation out;
  double sum_wy = 0.0;
  double sum_wa = 0.0;
  for (const auto& c : cells.cells) {
    if (c.prob == 0.0) continue;
    const double w = c.prob / cond[covariate(c, weight_on)][c.a];
    out.weight_total += w;
    sum_wa += w * c.a;
    sum_wy += w * c.ey;
  }
  out.weighted_mean_a = sum_wa / out.weight_total;
  const double mean_y = sum_wy / out.weight_total;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& c : cells.cells) {
    if (c.prob == 0.0) continue;
    const double w = c.prob / cond[covariate(c, weight_on)][c.a];
    const double da = c.a - out.weighted_mean_a;
    sxy += w * (c.ey - mean_y) * da;
    sxx += w * da * da;
  }
  if (!(sxx > 0.0)) {
    throw DomainError(ErrorCode::singular_design, "treatment is constant in the population");
  }
  out.slope = sxy / sxx;
  out.intercept = mean_y - out.slope * out.weighted_mean_a;
  return out;
}

double population_ipw_slope(const CellTable& cells, Confounder weight_on) {
  return population_ipw(cells, weight_on).slope;
}

double cell_phi(const CellTable& cells, int a, int lstar) {
  const double joint = cells.mass([&](const Cell& c) { return c.a == a && c.lstar == lstar; });
  if (joint == 0.0) {
    throw DomainError(ErrorCode::conditioning, "conditioning event has probability zero");
  }
  return cells.mass([&](const Cell& c) { return c.a == a && c.lstar == lstar && c.l == 1; }) /
         joint;
}

}  // namespace msmbias::oracle
