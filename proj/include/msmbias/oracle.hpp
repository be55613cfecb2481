#pragma once

#include <array>
#include <vector>

#include "msmbias/params.hpp"

namespace msmbias::oracle {

// Which variable drives treatment assignment.
enum class TreatmentSetting {
  from_lstar = 1,  // A | L* ~ Bern(pi_{L*})
  from_l = 2,      // A | L ~ Bern(pi_L)
};

struct Cell {
  int l = 0;
  int lstar = 0;
  int a = 0;
  double prob = 0.0;
  double ey = 0.0;  // alpha + beta a + gamma l
};

// The exact joint distribution of (L, L*, A), indexed l*4 + lstar*2 + a.
struct CellTable {
  std::array<Cell, 8> cells{};

  double total() const;
  // Marginal probability of cells matching the predicate.
  template <class Pred>
  double mass(Pred pred) const {
    double m = 0.0;
    for (const auto& c : cells)
      if (pred(c)) m += c.prob;
    return m;
  }
};

CellTable enumerate_cells(const LatentParams& p,
                          TreatmentSetting setting = TreatmentSetting::from_l);

enum class Confounder { none, l, lstar };

struct Regressors {
  Confounder confounder = Confounder::lstar;
  bool interaction = false;  // adds A * confounder
};

// Population least squares of E[Y] on (1, A[, V][, A V]) with cell
// probabilities as weights. Coefficients in that order.
std::vector<double> population_ols(const CellTable& cells, Regressors regressors);

struct IpwPopulation {
  double slope = 0.0;
  double intercept = 0.0;
  double weight_total = 0.0;     // sum of prob / P(A = a | V)
  double weighted_mean_a = 0.0;  // weighted mean of A
};

// Population analogue of the weighted least squares MSM estimator with
// weights 1 / P(A | V), V = L or L*.
IpwPopulation population_ipw(const CellTable& cells, Confounder weight_on);
double population_ipw_slope(const CellTable& cells, Confounder weight_on);

// Population P(L = 1 | A = a, L* = lstar) by cell ratio.
double cell_phi(const CellTable& cells, int a, int lstar);

// Dense solve with partial pivoting; throws singular_design when the
// absolute determinant falls below 1e-12.
std::vector<double> solve_pivoted(std::vector<std::vector<double>> a, std::vector<double> b);

}  // namespace msmbias::oracle
