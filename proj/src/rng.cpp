#include "msmbias/rng.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace msmbias::rng {

double standard_normal(Engine& eng) {
  // Phi^-1(u) = -sqrt(2) erfc^-1(2u)
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform_open(eng));
}

}  // namespace msmbias::rng
