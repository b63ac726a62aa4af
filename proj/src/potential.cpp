#include "expent/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "expent/error.hpp"

namespace expent {

namespace {

void require_positive(double r, const char* what) {
  if (!(r > 0.0))
    throw DomainError(std::string(what) + ": separation must be positive, got " +
                      std::to_string(r));
}

// r^-delta for real delta.
double inverse_power(double r, double delta) { return std::exp(-delta * std::log(r)); }

}  // namespace

void PotentialParams::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("potential: c1 and c2 must be positive");
  if (!(delta1 > delta2) || !(delta2 > 2.0))
    throw std::invalid_argument("potential: exponents must satisfy delta1 > delta2 > 2");
}

double phi(const PotentialParams& p, double r) {
  require_positive(r, "phi");
  return p.c1 * inverse_power(r, p.delta1) - p.c2 * inverse_power(r, p.delta2);
}

double dphi(const PotentialParams& p, double r) {
  require_positive(r, "dphi");
  return -p.delta1 * p.c1 * inverse_power(r, p.delta1 + 1.0) +
         p.delta2 * p.c2 * inverse_power(r, p.delta2 + 1.0);
}

double d2phi(const PotentialParams& p, double r) {
  require_positive(r, "d2phi");
  return p.delta1 * (p.delta1 + 1.0) * p.c1 * inverse_power(r, p.delta1 + 2.0) -
         p.delta2 * (p.delta2 + 1.0) * p.c2 * inverse_power(r, p.delta2 + 2.0);
}

double potential_minimizer(const PotentialParams& p) {
  return std::pow(p.delta1 * p.c1 / (p.delta2 * p.c2), 1.0 / (p.delta1 - p.delta2));
}

}  // namespace expent
