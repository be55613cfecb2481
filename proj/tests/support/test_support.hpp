#pragma once

#include <cmath>
#include <random>

#include "msmbias/oracle.hpp"
#include "msmbias/params.hpp"
#include "msmbias/simulation.hpp"

namespace msmbias::testing {

inline LatentParams scenario_params(int scenario) {
  return find_scenario(builtin_scenarios(), std::to_string(scenario)).params;
}

// Population Var(A) Var(L*) - Cov(A, L*)^2 straight from the joint cells.
inline double design_determinant(const LatentParams& p) {
  const auto cells = oracle::enumerate_cells(p);
  double ea = 0, el = 0, eal = 0;
  for (const auto& c : cells.cells) {
    ea += c.prob * c.a;
    el += c.prob * c.lstar;
    eal += c.prob * c.a * c.lstar;
  }
  const double var_a = ea * (1 - ea), var_l = el * (1 - el), cov = eal - ea * el;
  return var_a * var_l - cov * cov;
}

// Probabilities uniform on [0.02, 0.98], gamma on [-5, 5]; near-singular
// designs (determinant < 1e-8) are redrawn.
class ParamGenerator {
 public:
  explicit ParamGenerator(std::uint64_t seed) : eng_(seed) {}

  LatentParams operator()() {
    std::uniform_real_distribution<double> prob(0.02, 0.98), gamma(-5.0, 5.0),
        coef(-3.0, 3.0);
    for (;;) {
      LatentParams p;
      p.lambda = prob(eng_);
      p.pi0 = prob(eng_);
      p.pi1 = prob(eng_);
      p.p0 = prob(eng_);
      p.p1 = prob(eng_);
      p.gamma = gamma(eng_);
      p.alpha = coef(eng_);
      p.beta = coef(eng_);
      if (design_determinant(p) >= 1e-8) return p;
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace msmbias::testing
