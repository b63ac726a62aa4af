#include "expent/expent.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <exception>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "expent/entropy.hpp"
#include "expent/equilibria.hpp"
#include "expent/error.hpp"
#include "expent/geometry.hpp"
#include "expent/integrator.hpp"
#include "expent/systems.hpp"

struct expent_system {
  expent::SystemDef def;
};

struct expent_entropy_result {
  expent::EntropyEstimate estimate;
  std::string fit_error;
};

struct expent_equilibrium_table {
  std::vector<expent::BranchRow> rows;
};

namespace {

thread_local std::string last_error;

expent_status fail(expent_status status, const char* message) {
  last_error = message;
  return status;
}

// Maps the exception in flight to a status code.
expent_status translate() {
  try {
    throw;
  } catch (const expent::DomainError& e) {
    return fail(EXPENT_ERR_DOMAIN, e.what());
  } catch (const expent::NumericalError& e) {
    return fail(EXPENT_ERR_NUMERICAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(EXPENT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::logic_error& e) {
    return fail(EXPENT_ERR_UNAVAILABLE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EXPENT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EXPENT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EXPENT_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
expent_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return EXPENT_OK;
  } catch (...) {
    return translate();
  }
}

#define EXPENT_REQUIRE(cond)                                                   \
  do {                                                                         \
    if (!(cond)) return fail(EXPENT_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

expent::IntegratorConfig to_cpp(const expent_integrator_config* cfg) {
  expent::IntegratorConfig out;
  if (!cfg) return out;
  out.rel_tol = cfg->rel_tol;
  out.abs_tol = cfg->abs_tol;
  out.max_step = cfg->max_step > 0.0 ? cfg->max_step : std::numeric_limits<double>::infinity();
  out.initial_step = cfg->initial_step;
  out.max_steps = static_cast<std::size_t>(cfg->max_steps);
  return out;
}

expent::PotentialParams to_cpp(const expent_potential* p) {
  return {p->c1, p->c2, p->delta1, p->delta2};
}

expent_equilibrium to_c(const expent::EquilibriumPoint& eq, int multiplicity) {
  expent_equilibrium out{};
  out.area = eq.area;
  out.a = eq.triangle.a;
  out.b = eq.triangle.b;
  out.c = eq.triangle.c;
  out.lambda = eq.lambda;
  out.kind = static_cast<expent_shape_kind>(eq.kind);
  out.stability = static_cast<expent_stability>(eq.stability);
  out.multiplicity = multiplicity;
  return out;
}

void copy_row_major(const expent::Matrix& m, double* out) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

}  // namespace

extern "C" {

const char* expent_last_error(void) { return last_error.c_str(); }

const char* expent_version(void) { return "1.0.0"; }

expent_status expent_system_create(const char* name, size_t n_params, const char* const* keys,
                                   const double* values, expent_system** out) {
  EXPENT_REQUIRE(name);
  EXPENT_REQUIRE(out);
  EXPENT_REQUIRE(n_params == 0 || (keys && values));
  *out = nullptr;
  return guarded([&] {
    expent::ParamMap params;
    for (size_t i = 0; i < n_params; ++i) {
      if (!keys[i]) throw std::invalid_argument("null parameter key");
      params[keys[i]] = values[i];
    }
    *out = new expent_system{expent::make_system(name, params)};
  });
}

void expent_system_destroy(expent_system* sys) { delete sys; }

size_t expent_system_dim(const expent_system* sys) { return sys ? sys->def.dim() : 0; }

expent_status expent_system_rhs(const expent_system* sys, const double* x, double* dxdt) {
  EXPENT_REQUIRE(sys && x && dxdt);
  return guarded([&] {
    const std::size_t n = sys->def.dim();
    sys->def.rhs(std::span<const double>(x, n), std::span<double>(dxdt, n));
  });
}

expent_status expent_system_jacobian(const expent_system* sys, const double* x, double* jac) {
  EXPENT_REQUIRE(sys && x && jac);
  return guarded([&] {
    copy_row_major(sys->def.jacobian(std::span<const double>(x, sys->def.dim())), jac);
  });
}

expent_status expent_system_energy(const expent_system* sys, const double* x, double* energy) {
  EXPENT_REQUIRE(sys && x && energy);
  return guarded([&] { *energy = sys->def.energy(std::span<const double>(x, sys->def.dim())); });
}

void expent_integrator_config_default(expent_integrator_config* cfg) {
  if (!cfg) return;
  const expent::IntegratorConfig d;
  cfg->rel_tol = d.rel_tol;
  cfg->abs_tol = d.abs_tol;
  cfg->max_step = 0.0;
  cfg->initial_step = d.initial_step;
  cfg->max_steps = d.max_steps;
}

expent_status expent_flow(const expent_system* sys, const expent_integrator_config* cfg,
                          const double* p, double T, double* r_out) {
  EXPENT_REQUIRE(sys && p && r_out);
  return guarded([&] {
    const auto r = expent::flow(sys->def, std::span<const double>(p, sys->def.dim()), T, to_cpp(cfg));
    std::copy(r.begin(), r.end(), r_out);
  });
}

expent_status expent_flow_with_tangent(const expent_system* sys,
                                       const expent_integrator_config* cfg, const double* p,
                                       double T, double* r_out, double* u_out) {
  EXPENT_REQUIRE(sys && p && r_out && u_out);
  return guarded([&] {
    const auto s = expent::flow_with_tangent(sys->def, std::span<const double>(p, sys->def.dim()),
                                             T, to_cpp(cfg));
    std::copy(s.r.begin(), s.r.end(), r_out);
    copy_row_major(s.u, u_out);
  });
}

expent_status expent_flow_until_exit(const expent_system* sys,
                                     const expent_integrator_config* cfg, const double* p,
                                     double T, const double* lower, const double* upper,
                                     int* exited, double* exit_time, double* r_out,
                                     double* u_out) {
  EXPENT_REQUIRE(sys && p && lower && upper && exited && exit_time && r_out);
  return guarded([&] {
    const std::size_t n = sys->def.dim();
    const expent::Box box(std::vector<double>(lower, lower + n), std::vector<double>(upper, upper + n));
    const auto res = expent::flow_until_exit(sys->def, std::span<const double>(p, n), T, box,
                                             to_cpp(cfg), u_out != nullptr);
    *exited = res.stayed() ? 0 : 1;
    *exit_time = res.stayed() ? T : *res.exit_time;
    std::copy(res.state.r.begin(), res.state.r.end(), r_out);
    if (u_out) copy_row_major(res.state.u, u_out);
  });
}

expent_status expent_sample_orbit(const expent_system* sys, const expent_integrator_config* cfg,
                                  const double* p, double T, size_t intervals,
                                  double* rows_out) {
  EXPENT_REQUIRE(sys && p && rows_out);
  return guarded([&] {
    const std::size_t n = sys->def.dim();
    const auto orbit = expent::sample_orbit(sys->def, std::span<const double>(p, n), T, intervals,
                                            to_cpp(cfg));
    double* row = rows_out;
    for (const auto& s : orbit) {
      row[0] = s.t;
      std::copy(s.x.begin(), s.x.end(), row + 1);
      row += n + 1;
    }
  });
}

expent_status expent_entropy_run(const expent_system* sys, const expent_integrator_config* icfg,
                                 const expent_entropy_config* cfg, expent_entropy_result** out) {
  EXPENT_REQUIRE(sys && cfg && out);
  EXPENT_REQUIRE(cfg->lower && cfg->upper && cfg->t_grid);
  *out = nullptr;
  return guarded([&] {
    const std::size_t n = sys->def.dim();
    expent::EntropyRunConfig run;
    run.region = expent::Box(std::vector<double>(cfg->lower, cfg->lower + n),
                             std::vector<double>(cfg->upper, cfg->upper + n));
    run.points_per_sample = cfg->points_per_sample;
    run.samples = cfg->samples;
    run.t_grid.assign(cfg->t_grid, cfg->t_grid + cfg->t_count);
    run.seed = cfg->seed;
    run.fit_window = cfg->fit_window;
    run.threads = cfg->threads;

    auto result = std::make_unique<expent_entropy_result>();
    result->estimate = expent::estimate_et(sys->def, run, to_cpp(icfg));
    try {
      result->estimate.fit = expent::fit_slope(result->estimate.per_t, run.fit_window);
    } catch (const expent::NumericalError& e) {
      result->fit_error = e.what();
    }
    *out = result.release();
  });
}

void expent_entropy_result_destroy(expent_entropy_result* result) { delete result; }

size_t expent_entropy_result_rows(const expent_entropy_result* result) {
  return result ? result->estimate.per_t.size() : 0;
}

expent_status expent_entropy_result_row(const expent_entropy_result* result, size_t index,
                                        expent_entropy_row* row) {
  EXPENT_REQUIRE(result && row);
  if (index >= result->estimate.per_t.size())
    return fail(EXPENT_ERR_INVALID_ARGUMENT, "entropy row index out of range");
  const auto& r = result->estimate.per_t[index];
  *row = {r.t, r.mean_log_e, r.var_log_e, r.mean_retained, r.valid ? 1 : 0};
  last_error.clear();
  return EXPENT_OK;
}

expent_status expent_entropy_result_slope(const expent_entropy_result* result, double* slope,
                                          double* standard_error) {
  EXPENT_REQUIRE(result && slope && standard_error);
  if (!result->estimate.fit) return fail(EXPENT_ERR_NUMERICAL, result->fit_error.c_str());
  *slope = result->estimate.fit->slope;
  *standard_error = result->estimate.fit->standard_error;
  last_error.clear();
  return EXPENT_OK;
}

size_t expent_entropy_result_failed_points(const expent_entropy_result* result) {
  return result ? result->estimate.failed_points : 0;
}

size_t expent_entropy_result_warning_count(const expent_entropy_result* result) {
  return result ? result->estimate.warnings.size() : 0;
}

const char* expent_entropy_result_warning(const expent_entropy_result* result, size_t index) {
  if (!result || index >= result->estimate.warnings.size()) return nullptr;
  return result->estimate.warnings[index].c_str();
}

expent_status expent_big_g(const double* u, size_t n, double* g) {
  EXPENT_REQUIRE(u && g && n > 0);
  return guarded([&] {
    *g = expent::big_g(expent::Matrix::from_rows(n, n, std::span<const double>(u, n * n)));
  });
}

void expent_potential_default(expent_potential* p) {
  if (!p) return;
  const auto d = expent::PotentialParams::lennard_jones();
  *p = {d.c1, d.c2, d.delta1, d.delta2};
}

expent_status expent_sides_to_coords(double a, double b, double c, double* coords_out) {
  EXPENT_REQUIRE(coords_out);
  return guarded([&] {
    const auto x = expent::sides_to_coords({a, b, c});
    coords_out[0] = x.u1;
    coords_out[1] = x.w1;
    coords_out[2] = x.u2;
  });
}

expent_status expent_rho(const expent_potential* p, double area, double* rho) {
  EXPENT_REQUIRE(p && rho);
  return guarded([&] {
    to_cpp(p).validate();
    *rho = expent::rho(area, to_cpp(p));
  });
}

expent_status expent_critical_area(const expent_potential* p, double lo, double hi,
                                   double* area) {
  EXPENT_REQUIRE(p && area);
  return guarded([&] { *area = expent::critical_area(to_cpp(p), lo, hi); });
}

expent_status expent_equilateral(const expent_potential* p, double area,
                                 expent_equilibrium* out) {
  EXPENT_REQUIRE(p && out);
  return guarded([&] {
    to_cpp(p).validate();
    *out = to_c(expent::equilateral(area, to_cpp(p)), 1);
  });
}

expent_status expent_solve_equilibrium(const expent_potential* p, double area, double a,
                                       double b, double c, expent_equilibrium* out) {
  EXPENT_REQUIRE(p && out);
  return guarded([&] {
    to_cpp(p).validate();
    const auto eq = expent::solve_equieq(area, to_cpp(p), {a, b, c});
    const int mult = eq.kind == expent::ShapeKind::equilateral
                         ? 1
                         : (eq.kind == expent::ShapeKind::isosceles ? 3 : 6);
    *out = to_c(eq, mult);
  });
}

expent_status expent_equilibrium_state(const expent_equilibrium* eq, double* state_out) {
  EXPENT_REQUIRE(eq && state_out);
  return guarded([&] {
    expent::EquilibriumPoint point;
    point.triangle = {eq->a, eq->b, eq->c};
    point.area = eq->area;
    const auto s = expent::equilibrium_state(point);
    std::copy(s.begin(), s.end(), state_out);
  });
}

expent_status expent_equilibrium_scan(const expent_potential* p, double area_min,
                                      double area_max, double area_step,
                                      expent_equilibrium_table** out) {
  EXPENT_REQUIRE(p && out);
  *out = nullptr;
  return guarded([&] {
    auto rows = expent::continuation_scan(to_cpp(p), area_min, area_max, area_step);
    *out = new expent_equilibrium_table{std::move(rows)};
  });
}

void expent_equilibrium_table_destroy(expent_equilibrium_table* table) { delete table; }

size_t expent_equilibrium_table_rows(const expent_equilibrium_table* table) {
  return table ? table->rows.size() : 0;
}

expent_status expent_equilibrium_table_row(const expent_equilibrium_table* table, size_t index,
                                           expent_equilibrium* row) {
  EXPENT_REQUIRE(table && row);
  if (index >= table->rows.size())
    return fail(EXPENT_ERR_INVALID_ARGUMENT, "equilibrium row index out of range");
  const auto& r = table->rows[index];
  *row = to_c(r.point, r.multiplicity);
  last_error.clear();
  return EXPENT_OK;
}

}  // extern "C"
