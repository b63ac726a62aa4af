#include <cmath>
#include <random>

#include "doctest.h"
#include "expent/error.hpp"
#include "expent/linalg.hpp"
#include "oracles.hpp"

using expent::Matrix;

TEST_CASE("singular values of a diagonal matrix are sorted absolute entries") {
  const double d[] = {-3.0, 0.5, 2.0};
  const auto sv = expent::singular_values(Matrix::diagonal(d));
  REQUIRE(sv.size() == 3);
  CHECK(sv[0] == doctest::Approx(3.0));
  CHECK(sv[1] == doctest::Approx(2.0));
  CHECK(sv[2] == doctest::Approx(0.5));
}

TEST_CASE("singular values of a 2x2 match the closed form") {
  // sigma^2 are the eigenvalues of A^T A
  const double a[] = {1.0, 2.0, 3.0, 4.0};
  const Matrix m = Matrix::from_rows(2, 2, a);
  const double p = 1 + 9, q = 2 + 12, r = 4 + 16;
  const double mean = 0.5 * (p + r);
  const double rad = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
  const auto sv = expent::singular_values(m);
  CHECK(sv[0] == doctest::Approx(std::sqrt(mean + rad)).epsilon(1e-13));
  CHECK(sv[1] == doctest::Approx(std::sqrt(mean - rad)).epsilon(1e-12));
}

TEST_CASE("singular values are invariant under orthogonal transforms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(4, 4);
    for (auto& x : m.data()) x = oracle::uniform(rng, -3, 3);
    const auto q = oracle::random_orthogonal(rng, 4);
    const auto r = oracle::random_orthogonal(rng, 4);
    const auto a = expent::singular_values(m);
    const auto b = expent::singular_values(oracle::matmul(oracle::matmul(q, m), r));
    for (std::size_t i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-10));
  }
}

TEST_CASE("product of singular values is |det|") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(3, 3);
    for (auto& x : m.data()) x = oracle::uniform(rng, -2, 2);
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    double prod = 1;
    for (double s : expent::singular_values(m)) prod *= s;
    CHECK(prod == doctest::Approx(std::abs(det)).epsilon(1e-10));
  }
}

TEST_CASE("wide matrices are handled through the transpose") {
  const double a[] = {3.0, 0.0, 0.0, 0.0, 4.0, 0.0};
  const auto sv = expent::singular_values(Matrix::from_rows(2, 3, a));
  REQUIRE(sv.size() == 2);
  CHECK(sv[0] == doctest::Approx(4.0));
  CHECK(sv[1] == doctest::Approx(3.0));
}

TEST_CASE("rank-deficient matrix has a zero singular value") {
  const double a[] = {1, 2, 2, 4};
  const auto sv = expent::singular_values(Matrix::from_rows(2, 2, a));
  CHECK(sv[0] == doctest::Approx(5.0));
  CHECK(std::abs(sv[1]) < 1e-12);
}

TEST_CASE("solve recovers a known solution") {
  const double a[] = {0, 2, 1, 1, 1, 1, 2, 1, 3};
  const Matrix m = Matrix::from_rows(3, 3, a);
  const std::vector<double> x{1.5, -2.0, 0.25};
  const auto x2 = expent::solve(m, expent::multiply(m, x));
  for (std::size_t i = 0; i < 3; ++i) CHECK(x2[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

TEST_CASE("solve rejects a singular matrix") {
  const double a[] = {1, 2, 2, 4};
  CHECK_THROWS_AS(expent::solve(Matrix::from_rows(2, 2, a), {1.0, 1.0}),
                  expent::SingularSystemError);
}

TEST_CASE("symmetric 2x2 eigenvalues") {
  const auto [lo, hi] = expent::symmetric_eigenvalues_2x2(-0.45, -0.55, -0.45);
  CHECK(lo == doctest::Approx(-1.0));
  CHECK(hi == doctest::Approx(0.1));
}

TEST_CASE("matrix arithmetic") {
  const double a[] = {1, 2, 3, 4};
  const Matrix m = Matrix::from_rows(2, 2, a);
  CHECK(m * Matrix::identity(2) == m);
  CHECK(m.transposed()(0, 1) == 3.0);
  CHECK(m.trace() == 5.0);
  CHECK((m - m) == Matrix(2, 2));
  CHECK((2.0 * m)(1, 1) == 8.0);
  Matrix bad = m;
  bad(0, 0) = std::nan("");
  CHECK_FALSE(bad.all_finite());
}
