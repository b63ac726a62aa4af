#include <cmath>

#include "doctest.h"
#include "expent/error.hpp"
#include "expent/potential.hpp"

using expent::PotentialParams;

namespace {

const PotentialParams lj = PotentialParams::lennard_jones();

long double phi_ld(long double r) { return 1.0L / powl(r, 12) - 2.0L / powl(r, 6); }

}  // namespace

TEST_CASE("phi at the minimum of the 12-6 instance") {
  CHECK(expent::phi(lj, 1.0) == doctest::Approx(-1.0));
  CHECK(expent::dphi(lj, 1.0) == doctest::Approx(0.0));
  CHECK(expent::d2phi(lj, 1.0) == doctest::Approx(72.0));
}

TEST_CASE("phi agrees with extended-precision arithmetic") {
  for (double r : {0.8, 1.16499, 2.0, 3.7}) {
    const double ref = static_cast<double>(phi_ld(r));
    CHECK(expent::phi(lj, r) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("phi tends to zero from below") {
  const double far = expent::phi(lj, 1e3);
  CHECK(far < 0.0);
  CHECK(far > -1e-17);
}

TEST_CASE("derivatives match central differences on a log grid") {
  for (int k = 0; k <= 40; ++k) {
    const double r = 0.5 * std::pow(10.0, k / 40.0);
    const double h = 1e-6 * r;
    const double fd1 = (expent::phi(lj, r + h) - expent::phi(lj, r - h)) / (2 * h);
    const double fd2 = (expent::dphi(lj, r + h) - expent::dphi(lj, r - h)) / (2 * h);
    const double d1 = expent::dphi(lj, r);
    const double d2 = expent::d2phi(lj, r);
    CHECK(std::abs(fd1 - d1) <= 1e-6 * std::max(std::abs(d1), 1e-3 * std::abs(expent::phi(lj, r))));
    CHECK(std::abs(fd2 - d2) <= 1e-6 * std::max(std::abs(d2), 1e-3 * std::abs(d1)));
  }
}

TEST_CASE("minimizer is the closed-form critical point") {
  const PotentialParams p{2.0, 3.0, 9.5, 4.0};
  const double r = expent::potential_minimizer(p);
  CHECK(r == doctest::Approx(std::pow(9.5 * 2.0 / (4.0 * 3.0), 1.0 / 5.5)));
  CHECK(std::abs(expent::dphi(p, r)) < 1e-12);
  CHECK(expent::d2phi(p, r) > 0.0);
  // single sign change of phi' on (0, inf)
  int changes = 0;
  double prev = expent::dphi(p, 0.3);
  for (double x = 0.31; x < 20.0; x += 0.01) {
    const double cur = expent::dphi(p, x);
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }
  CHECK(changes == 1);
}

TEST_CASE("rho vanishes at r = 2.5^(1/6)") {
  const double r = std::pow(2.5, 1.0 / 6.0);
  CHECK(std::abs(expent::d2phi(lj, r) + 3 * expent::dphi(lj, r) / r) < 1e-12);
}

TEST_CASE("non-positive distances are domain errors") {
  CHECK_THROWS_AS(expent::phi(lj, 0.0), expent::DomainError);
  CHECK_THROWS_AS(expent::dphi(lj, -1.0), expent::DomainError);
  CHECK_THROWS_AS(expent::d2phi(lj, 0.0), expent::DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(lj.validate());
  CHECK_THROWS_AS((PotentialParams{-1, 2, 12, 6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PotentialParams{1, 0, 12, 6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PotentialParams{1, 2, 6, 12}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PotentialParams{1, 2, 4, 2}.validate()), std::invalid_argument);
}
