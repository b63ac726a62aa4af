#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "expent/error.hpp"
#include "expent/integrator.hpp"
#include "expent/systems.hpp"
#include "oracles.hpp"

using expent::Box;
using expent::IntegratorConfig;
using expent::Matrix;
using expent::State;

namespace {

expent::SystemDef oscillator() {
  return expent::make_system("linear", {{"a12", 1.0}, {"a21", -1.0}, {"a11", 0.0}, {"a22", 0.0}});
}

expent::SystemDef growth() { return expent::make_system("linear", {{"n", 1}, {"a11", 1.0}}); }

double oscillator_error(double h) {
  const auto sys = oscillator();
  const State y0{1.0, 0.0};
  expent::DormandPrince45 dp([&](std::span<const double> y, std::span<double> f) { sys.rhs(y, f); },
                             y0, 0.0, {});
  const int steps = static_cast<int>(std::lround(2.0 / h));
  for (int i = 0; i < steps; ++i) dp.fixed_step(h);
  return std::hypot(dp.y()[0] - std::cos(2.0), dp.y()[1] + std::sin(2.0));
}

}  // namespace

TEST_CASE("harmonic oscillator against the closed form") {
  const auto sys = oscillator();
  const State p{1.0, 0.0};
  for (double t : {0.5, 3.0, 20.0}) {
    const auto r = expent::flow(sys, p, t);
    CHECK(r[0] == doctest::Approx(std::cos(t)).epsilon(1e-8));
    CHECK(r[1] == doctest::Approx(-std::sin(t)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("fixed-step convergence order is at least four") {
  const double e1 = oscillator_error(0.1);
  const double e2 = oscillator_error(0.05);
  const double order = std::log2(e1 / e2);
  MESSAGE("observed order " << order);
  CHECK(order >= 4.0);
}

TEST_CASE("tighter tolerances never increase the error") {
  const auto sys = oscillator();
  const State p{1.0, 0.0};
  double prev = INFINITY;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    IntegratorConfig cfg;
    cfg.rel_tol = cfg.abs_tol = tol;
    const auto r = expent::flow(sys, p, 10.0, cfg);
    const double err = std::hypot(r[0] - std::cos(10.0), r[1] + std::sin(10.0));
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("dense output interpolates within the step") {
  const auto sys = oscillator();
  const State y0{1.0, 0.0};
  expent::DormandPrince45 dp([&](std::span<const double> y, std::span<double> f) { sys.rhs(y, f); },
                             y0, 0.0, {});
  dp.step(5.0);
  dp.step(5.0);
  State out(2);
  const double t0 = dp.previous_t(), t1 = dp.t();
  for (int k = 0; k <= 8; ++k) {
    const double t = t0 + (t1 - t0) * k / 8.0;
    dp.dense_output(t, out);
    CHECK(out[0] == doctest::Approx(std::cos(t)).epsilon(1e-8));
  }
  CHECK(dp.accepted_steps() == 2);
}

TEST_CASE("tangent of a linear flow is the matrix exponential") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m(3, 3);
    for (auto& x : m.data()) x = oracle::uniform(rng, -1, 1);
    const auto sys = expent::linear_system(m);
    const State p{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                  oracle::uniform(rng, -1, 1)};
    const auto ts = expent::flow_with_tangent(sys, p, 2.0);
    const auto e = oracle::expm(m, 2.0);
    CHECK(oracle::max_rel_diff(ts.u, e) < 1e-8);
    const auto r = expent::multiply(e, p);
    for (std::size_t i = 0; i < 3; ++i) CHECK(ts.r[i] == doctest::Approx(r[i]).epsilon(1e-8).scale(1));
  }
}

TEST_CASE("tangent at T = 0 is the identity") {
  const auto ts = expent::flow_with_tangent(expent::sprott_a(), State{1, 2, 3}, 0.0);
  CHECK(ts.u == Matrix::identity(3));
  CHECK(ts.r == State{1, 2, 3});
}

TEST_CASE("tangent matches finite differences of the flow") {
  std::mt19937_64 rng(37);
  const auto sprott = expent::sprott_a();
  const auto pend = expent::double_pendulum({});
  const auto lj = expent::make_system("lj_reduced", {{"A", 0.65}});
  for (int i = 0; i < 5; ++i) {
    const State a{oracle::uniform(rng, -3, 3), oracle::uniform(rng, -3, 3),
                  oracle::uniform(rng, -3, 3)};
    CHECK(oracle::max_rel_diff(expent::flow_with_tangent(sprott, a, 1.0).u,
                               oracle::fd_flow_jacobian(sprott, a, 1.0)) < 1e-4);
    const State b{oracle::uniform(rng, -2, 2), oracle::uniform(rng, -3, 3),
                  oracle::uniform(rng, -2, 2), oracle::uniform(rng, -3, 3)};
    CHECK(oracle::max_rel_diff(expent::flow_with_tangent(pend, b, 1.0).u,
                               oracle::fd_flow_jacobian(pend, b, 1.0)) < 1e-4);
    const State c{oracle::uniform(rng, 0.3, 0.8), oracle::uniform(rng, 0.9, 1.2),
                  oracle::uniform(rng, -0.3, 0.3), oracle::uniform(rng, -0.3, 0.3)};
    CHECK(oracle::max_rel_diff(expent::flow_with_tangent(lj, c, 1.0).u,
                               oracle::fd_flow_jacobian(lj, c, 1.0)) < 1e-4);
  }
}

TEST_CASE("energy is conserved on long orbits") {
  SUBCASE("LJ at A = 0.65") {
    const auto sys = expent::make_system("lj_reduced", {{"A", 0.65}});
    const State p{0.6226, 1.0611, 0.1, 0.1};
    const double e0 = sys.energy(p);
    double worst = 0;
    for (const auto& s : expent::sample_orbit(sys, p, 100.0, 1000))
      worst = std::max(worst, std::abs(sys.energy(s.x) - e0) / std::abs(e0));
    CHECK(worst < 1e-6);
  }
  SUBCASE("double pendulum") {
    const auto sys = expent::double_pendulum({});
    const State p{1.0, 0.5, -0.7, 2.0};
    const double e0 = sys.energy(p);
    double worst = 0;
    for (const auto& s : expent::sample_orbit(sys, p, 100.0, 1000))
      worst = std::max(worst, std::abs(sys.energy(s.x) - e0) / std::abs(e0));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("exit time of exponential growth") {
  const auto sys = growth();
  const Box box({-1.0}, {1.0});
  const auto res = expent::flow_until_exit(sys, State{0.5}, 5.0, box);
  REQUIRE(res.exit_time.has_value());
  CHECK(*res.exit_time == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(res.retained_through(0.69));
  CHECK_FALSE(res.retained_through(0.7));
  CHECK(res.state.u(0, 0) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("an orbit that leaves and returns between steps is caught") {
  // x(t) = sin(t) grazes above 0.999 briefly; a large step could straddle it
  const auto sys = oscillator();
  const Box box({-0.999, -2.0}, {0.999, 2.0});
  IntegratorConfig cfg;
  cfg.rel_tol = cfg.abs_tol = 1e-6;
  const auto res = expent::flow_until_exit(sys, State{0.0, 1.0}, 10.0, box, cfg, false);
  REQUIRE(res.exit_time.has_value());
  // loose tolerances put the crossing within ~1e-5 of the exact time
  CHECK(std::abs(*res.exit_time - std::asin(0.999)) < 1e-4);
  CHECK(res.state.u.rows() == 0);
}

TEST_CASE("orbits inside the box are retained") {
  const auto sys = oscillator();
  const auto res = expent::flow_until_exit(sys, State{0.5, 0.0}, 30.0, Box::symmetric(2, 1.0));
  CHECK(res.stayed());
  CHECK(res.state.t == 30.0);
}

TEST_CASE("grid callbacks stop at the exit") {
  const auto sys = growth();
  const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  std::vector<std::size_t> seen;
  const auto res = expent::flow_until_exit(
      sys, State{0.5}, grid, Box({-1.0}, {1.0}), {},
      [&](std::size_t idx, const expent::TangentState& s) {
        seen.push_back(idx);
        CHECK(s.t == grid[idx]);
        CHECK(s.u(0, 0) == doctest::Approx(std::exp(grid[idx])).epsilon(1e-8));
      });
  CHECK(seen == std::vector<std::size_t>{0, 1});
  CHECK(*res.exit_time == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("sample_orbit returns uniform times") {
  const auto orbit = expent::sample_orbit(oscillator(), State{1.0, 0.0}, 2.0, 4);
  REQUIRE(orbit.size() == 5);
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    CHECK(orbit[k].t == doctest::Approx(0.5 * k));
    CHECK(orbit[k].x[0] == doctest::Approx(std::cos(0.5 * k)).epsilon(1e-8));
  }
}

TEST_CASE("argument and failure handling") {
  const auto sys = oscillator();
  CHECK_THROWS_AS(expent::flow(sys, State{1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(expent::flow(sys, State{1.0, 0.0}, -1.0), std::invalid_argument);
  IntegratorConfig bad;
  bad.rel_tol = 0;
  CHECK_THROWS_AS(expent::flow(sys, State{1.0, 0.0}, 1.0, bad), std::invalid_argument);
  IntegratorConfig few;
  few.max_steps = 3;
  CHECK_THROWS_AS(expent::flow(sys, State{1.0, 0.0}, 100.0, few), expent::NumericalError);
  CHECK_THROWS_AS(expent::flow_until_exit(sys, State{5.0, 0.0}, 1.0, Box::symmetric(2, 1.0)),
                  expent::DomainError);
  CHECK_THROWS_AS(Box({1.0}, {0.0}), std::invalid_argument);
  // below the height floor from the start
  const auto lj = expent::make_system("lj_reduced", {{"A", 0.65}});
  CHECK_THROWS_AS(expent::flow(lj, State{0.0, 1e-9, 0, 0}, 1.0), expent::DomainError);
}
