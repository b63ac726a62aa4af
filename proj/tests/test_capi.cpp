#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "expent/expent.h"

namespace {

expent_system* make(const char* name, std::vector<const char*> keys = {},
                    std::vector<double> values = {}) {
  expent_system* sys = nullptr;
  REQUIRE(expent_system_create(name, keys.size(), keys.data(), values.data(), &sys) == EXPENT_OK);
  REQUIRE(sys != nullptr);
  return sys;
}

}  // namespace

TEST_CASE("version string") { CHECK(std::strlen(expent_version()) > 0); }

TEST_CASE("system lifecycle and evaluation") {
  expent_system* sys = make("sprott_a");
  CHECK(expent_system_dim(sys) == 3);
  const double x[] = {0.3, -1.2, 2.5};
  double f[3], j[9];
  CHECK(expent_system_rhs(sys, x, f) == EXPENT_OK);
  CHECK(f[0] == doctest::Approx(-1.2));
  CHECK(f[1] == doctest::Approx(-0.3 - 3.0));
  CHECK(f[2] == doctest::Approx(1 - 1.44));
  CHECK(expent_system_jacobian(sys, x, j) == EXPENT_OK);
  CHECK(j[3] == -1.0);  // row-major: d f1 / d x0
  CHECK(j[4] == 2.5);
  double e;
  CHECK(expent_system_energy(sys, x, &e) == EXPENT_ERR_UNAVAILABLE);
  expent_system_destroy(sys);
  expent_system_destroy(nullptr);
}

TEST_CASE("creation errors carry a message") {
  expent_system* sys = nullptr;
  CHECK(expent_system_create("lorenz", 0, nullptr, nullptr, &sys) == EXPENT_ERR_INVALID_ARGUMENT);
  CHECK(sys == nullptr);
  CHECK(std::string(expent_last_error()).find("lorenz") != std::string::npos);
  const char* keys[] = {"A"};
  const double values[] = {-1.0};
  CHECK(expent_system_create("lj_reduced", 1, keys, values, &sys) == EXPENT_ERR_INVALID_ARGUMENT);
  CHECK(expent_system_create(nullptr, 0, nullptr, nullptr, &sys) == EXPENT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("domain errors from the LJ system") {
  expent_system* sys = make("lj_reduced", {"A"}, {0.55});
  const double bad[] = {0.0, 0.0, 0.0, 0.0};
  double f[4];
  CHECK(expent_system_rhs(sys, bad, f) == EXPENT_ERR_DOMAIN);
  double e;
  const double good[] = {0.5635, 0.9760, 0.0, 0.0};
  CHECK(expent_system_energy(sys, good, &e) == EXPENT_OK);
  CHECK(e == doctest::Approx(-2.2125).epsilon(1e-3));
  expent_system_destroy(sys);
}

TEST_CASE("flows through the C interface") {
  expent_system* sys = make("linear", {"n", "a11"}, {1, 1.0});
  expent_integrator_config cfg;
  expent_integrator_config_default(&cfg);
  CHECK(cfg.rel_tol == 1e-10);
  const double p[] = {0.5};
  double r, u;
  CHECK(expent_flow(sys, &cfg, p, 1.0, &r) == EXPENT_OK);
  CHECK(r == doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-9));
  CHECK(expent_flow_with_tangent(sys, &cfg, p, 1.0, &r, &u) == EXPENT_OK);
  CHECK(u == doctest::Approx(std::exp(1.0)).epsilon(1e-9));

  const double lo[] = {-1.0}, hi[] = {1.0};
  int exited = 0;
  double t_exit = 0;
  CHECK(expent_flow_until_exit(sys, &cfg, p, 5.0, lo, hi, &exited, &t_exit, &r, nullptr) ==
        EXPENT_OK);
  CHECK(exited == 1);
  CHECK(t_exit == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  double rows[3 * 2];
  CHECK(expent_sample_orbit(sys, &cfg, p, 1.0, 2, rows) == EXPENT_OK);
  CHECK(rows[2] == 0.5);
  CHECK(rows[3] == doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-9));

  cfg.rel_tol = -1;
  CHECK(expent_flow(sys, &cfg, p, 1.0, &r) == EXPENT_ERR_INVALID_ARGUMENT);
  expent_system_destroy(sys);
}

TEST_CASE("entropy run through the C interface") {
  expent_system* sys = make("linear");
  const double lo[] = {-10, -10}, hi[] = {10, 10};
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k);
  expent_entropy_config cfg{lo, hi, 200, 3, grid.data(), grid.size(), 7, 0.5, 2};
  expent_entropy_result* res = nullptr;
  REQUIRE(expent_entropy_run(sys, nullptr, &cfg, &res) == EXPENT_OK);
  CHECK(expent_entropy_result_rows(res) == 20);
  expent_entropy_row row;
  CHECK(expent_entropy_result_row(res, 19, &row) == EXPENT_OK);
  CHECK(row.t == 20.0);
  CHECK(row.valid == 1);
  CHECK(expent_entropy_result_row(res, 20, &row) == EXPENT_ERR_INVALID_ARGUMENT);
  double slope, se;
  CHECK(expent_entropy_result_slope(res, &slope, &se) == EXPENT_OK);
  CHECK(std::abs(slope) < 0.05);
  CHECK(expent_entropy_result_failed_points(res) == 0);
  CHECK(expent_entropy_result_warning_count(res) == 0);
  expent_entropy_result_destroy(res);

  cfg.t_count = 0;
  CHECK(expent_entropy_run(sys, nullptr, &cfg, &res) == EXPENT_ERR_INVALID_ARGUMENT);
  expent_system_destroy(sys);
}

TEST_CASE("G through the C interface") {
  const double u[] = {3, 0, 0, 0.5};
  double g;
  CHECK(expent_big_g(u, 2, &g) == EXPENT_OK);
  CHECK(g == doctest::Approx(3.0));
  const double bad[] = {NAN, 0, 0, 1};
  CHECK(expent_big_g(bad, 2, &g) == EXPENT_ERR_DOMAIN);
}

TEST_CASE("equilibria through the C interface") {
  expent_potential p;
  expent_potential_default(&p);
  CHECK(p.delta1 == 12.0);

  double a0;
  CHECK(expent_critical_area(&p, 0.1, 10.0, &a0) == EXPENT_OK);
  CHECK(a0 == doctest::Approx(0.5877).epsilon(1e-3));

  expent_equilibrium eq;
  CHECK(expent_equilateral(&p, 0.55, &eq) == EXPENT_OK);
  CHECK(eq.kind == EXPENT_EQUILATERAL);
  CHECK(eq.stability == EXPENT_STABLE);
  double state[4];
  CHECK(expent_equilibrium_state(&eq, state) == EXPENT_OK);
  CHECK(state[0] == doctest::Approx(0.5635).epsilon(1e-3));

  CHECK(expent_solve_equilibrium(&p, 0.65, 1.42, 1.28, 1.06, &eq) == EXPENT_OK);
  CHECK(eq.kind == EXPENT_SCALENE);
  CHECK(eq.multiplicity == 6);

  double coords[3];
  CHECK(expent_sides_to_coords(1, 1, 1, coords) == EXPENT_OK);
  CHECK(coords[0] == doctest::Approx(0.5));
  CHECK(expent_sides_to_coords(3, 1, 1, coords) == EXPENT_ERR_DOMAIN);

  expent_equilibrium_table* table = nullptr;
  REQUIRE(expent_equilibrium_scan(&p, 0.65, 0.65, 0.01, &table) == EXPENT_OK);
  CHECK(expent_equilibrium_table_rows(table) == 4);
  expent_equilibrium_table_destroy(table);

  const expent_potential bad{1, 2, 2, 6};
  double r;
  CHECK(expent_rho(&bad, 0.5, &r) == EXPENT_ERR_INVALID_ARGUMENT);
}
