/*
 * C interface to the expent library: chaos detection by expansion entropy,
 * and equilibria of the area-constrained three-particle Lennard-Jones
 * system.
 *
 * Every function returns an expent_status. On failure a message describing
 * the last error on the calling thread is available from
 * expent_last_error(). Objects are opaque handles owned by the caller and
 * released with the matching *_destroy function. Matrices are row-major.
 */
#ifndef EXPENT_EXPENT_H
#define EXPENT_EXPENT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EXPENT_BUILDING_LIBRARY)
#    define EXPENT_API __declspec(dllexport)
#  else
#    define EXPENT_API __declspec(dllimport)
#  endif
#else
#  define EXPENT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum expent_status {
  EXPENT_OK = 0,
  EXPENT_ERR_INVALID_ARGUMENT = 1, /* bad parameter, unknown name, size mismatch */
  EXPENT_ERR_DOMAIN = 2,           /* state or argument outside the valid domain */
  EXPENT_ERR_NUMERICAL = 3,        /* step underflow, non-convergence, overflow */
  EXPENT_ERR_UNAVAILABLE = 4,      /* quantity not defined for this object */
  EXPENT_ERR_INTERNAL = 5
} expent_status;

/* Message for the last failed call on this thread ("" if none). */
EXPENT_API const char* expent_last_error(void);
EXPENT_API const char* expent_version(void);

/* ---- systems ---------------------------------------------------------- */

typedef struct expent_system expent_system;

/* Creates a catalogue system: "linear" (n, a11..ann), "sprott_a",
 * "double_pendulum" (m1, m2, l1, l2, g), "lj_reduced"
 * (c1, c2, delta1, delta2, m, A). Omitted parameters take defaults. */
EXPENT_API expent_status expent_system_create(const char* name, size_t n_params,
                                              const char* const* keys, const double* values,
                                              expent_system** out);
EXPENT_API void expent_system_destroy(expent_system* sys);
EXPENT_API size_t expent_system_dim(const expent_system* sys);
EXPENT_API expent_status expent_system_rhs(const expent_system* sys, const double* x,
                                           double* dxdt);
EXPENT_API expent_status expent_system_jacobian(const expent_system* sys, const double* x,
                                                double* jac);
/* EXPENT_ERR_UNAVAILABLE if the system has no conserved energy. */
EXPENT_API expent_status expent_system_energy(const expent_system* sys, const double* x,
                                              double* energy);

/* ---- integration ------------------------------------------------------ */

typedef struct expent_integrator_config {
  double rel_tol;
  double abs_tol;
  double max_step;     /* <= 0 or infinite: unbounded */
  double initial_step; /* 0: automatic */
  uint64_t max_steps;
} expent_integrator_config;

EXPENT_API void expent_integrator_config_default(expent_integrator_config* cfg);

/* r(T; p) into r_out (dim values). */
EXPENT_API expent_status expent_flow(const expent_system* sys,
                                     const expent_integrator_config* cfg, const double* p,
                                     double T, double* r_out);

/* r(T; p) and the dim x dim tangent u(T; p) (row-major). */
EXPENT_API expent_status expent_flow_with_tangent(const expent_system* sys,
                                                  const expent_integrator_config* cfg,
                                                  const double* p, double T, double* r_out,
                                                  double* u_out);

/* Integrates until T or the first exit from [lower, upper]. *exited is 1
 * when the orbit left, with *exit_time set; r_out/u_out hold the state at
 * min(exit, T). u_out may be NULL. */
EXPENT_API expent_status expent_flow_until_exit(const expent_system* sys,
                                                const expent_integrator_config* cfg,
                                                const double* p, double T,
                                                const double* lower, const double* upper,
                                                int* exited, double* exit_time, double* r_out,
                                                double* u_out);

/* Orbit at times k T / intervals, k = 0..intervals. rows_out holds
 * (intervals + 1) * (1 + dim) values: t followed by the state. */
EXPENT_API expent_status expent_sample_orbit(const expent_system* sys,
                                             const expent_integrator_config* cfg,
                                             const double* p, double T, size_t intervals,
                                             double* rows_out);

/* ---- expansion entropy ------------------------------------------------ */

typedef struct expent_entropy_config {
  const double* lower; /* dim values */
  const double* upper; /* dim values */
  size_t points_per_sample;
  size_t samples;
  const double* t_grid; /* strictly increasing, positive */
  size_t t_count;
  uint64_t seed;
  double fit_window; /* trailing fraction of the grid used by the fit */
  unsigned threads;  /* 0: hardware concurrency */
} expent_entropy_config;

typedef struct expent_entropy_row {
  double t;
  double mean_log_e; /* NaN when invalid */
  double var_log_e;
  double mean_retained;
  int valid;
} expent_entropy_row;

typedef struct expent_entropy_result expent_entropy_result;

/* Runs the estimator and the slope fit. A failed fit does not fail the
 * run; expent_entropy_result_slope then reports it. */
EXPENT_API expent_status expent_entropy_run(const expent_system* sys,
                                            const expent_integrator_config* icfg,
                                            const expent_entropy_config* cfg,
                                            expent_entropy_result** out);
EXPENT_API void expent_entropy_result_destroy(expent_entropy_result* result);
EXPENT_API size_t expent_entropy_result_rows(const expent_entropy_result* result);
EXPENT_API expent_status expent_entropy_result_row(const expent_entropy_result* result,
                                                   size_t index, expent_entropy_row* row);
EXPENT_API expent_status expent_entropy_result_slope(const expent_entropy_result* result,
                                                     double* slope, double* standard_error);
EXPENT_API size_t expent_entropy_result_failed_points(const expent_entropy_result* result);
EXPENT_API size_t expent_entropy_result_warning_count(const expent_entropy_result* result);
EXPENT_API const char* expent_entropy_result_warning(const expent_entropy_result* result,
                                                     size_t index);

/* Product of the singular values of an n x n matrix exceeding 1. */
EXPENT_API expent_status expent_big_g(const double* u, size_t n, double* g);

/* ---- geometry and equilibria ----------------------------------------- */

typedef struct expent_potential {
  double c1;
  double c2;
  double delta1;
  double delta2;
} expent_potential;

typedef enum expent_shape_kind {
  EXPENT_EQUILATERAL = 0,
  EXPENT_ISOSCELES = 1,
  EXPENT_SCALENE = 2
} expent_shape_kind;

typedef enum expent_stability {
  EXPENT_STABLE = 0,
  EXPENT_UNSTABLE = 1,
  EXPENT_MARGINAL = 2
} expent_stability;

typedef struct expent_equilibrium {
  double area;
  double a, b, c;
  double lambda;
  expent_shape_kind kind;
  expent_stability stability;
  int multiplicity; /* labeled permutations: 1, 3 or 6 */
} expent_equilibrium;

/* c1 = 1, c2 = 2, delta1 = 12, delta2 = 6. */
EXPENT_API void expent_potential_default(expent_potential* p);

/* (u1, w1, u2) of a triangle with particle 3 at the origin and particle 2
 * on the positive x-axis. */
EXPENT_API expent_status expent_sides_to_coords(double a, double b, double c,
                                                double* coords_out);

EXPENT_API expent_status expent_rho(const expent_potential* p, double area, double* rho);
EXPENT_API expent_status expent_critical_area(const expent_potential* p, double lo, double hi,
                                              double* area);
EXPENT_API expent_status expent_equilateral(const expent_potential* p, double area,
                                            expent_equilibrium* out);
/* Newton from (a, b, c); the multiplier is initialised by least squares. */
EXPENT_API expent_status expent_solve_equilibrium(const expent_potential* p, double area,
                                                  double a, double b, double c,
                                                  expent_equilibrium* out);
/* Reduced rest state (u1, w1, 0, 0). */
EXPENT_API expent_status expent_equilibrium_state(const expent_equilibrium* eq,
                                                  double* state_out);

typedef struct expent_equilibrium_table expent_equilibrium_table;

EXPENT_API expent_status expent_equilibrium_scan(const expent_potential* p, double area_min,
                                                 double area_max, double area_step,
                                                 expent_equilibrium_table** out);
EXPENT_API void expent_equilibrium_table_destroy(expent_equilibrium_table* table);
EXPENT_API size_t expent_equilibrium_table_rows(const expent_equilibrium_table* table);
EXPENT_API expent_status expent_equilibrium_table_row(const expent_equilibrium_table* table,
                                                      size_t index, expent_equilibrium* row);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* EXPENT_EXPENT_H */
