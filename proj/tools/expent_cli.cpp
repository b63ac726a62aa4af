// expent: orbit simulation, sensitivity runs, expansion-entropy estimates and
// equilibrium scans for the three-particle area-constrained system and the
// benchmark flows.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "expent/expent.h"

namespace {

using cli::Config;
using cli::ConfigError;
using cli::NumericalFailure;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

// --- C API plumbing ----------------------------------------------------------

void check(expent_status status, const std::string& what) {
  if (status == EXPENT_OK) return;
  const std::string msg = what + ": " + expent_last_error();
  if (status == EXPENT_ERR_NUMERICAL) throw NumericalFailure(msg);
  throw ConfigError(msg);
}

struct SystemDeleter {
  void operator()(expent_system* s) const { expent_system_destroy(s); }
};
struct EntropyDeleter {
  void operator()(expent_entropy_result* r) const { expent_entropy_result_destroy(r); }
};
struct TableDeleter {
  void operator()(expent_equilibrium_table* t) const { expent_equilibrium_table_destroy(t); }
};
using SystemPtr = std::unique_ptr<expent_system, SystemDeleter>;

struct SystemSpec {
  std::string name;
  std::vector<std::pair<std::string, double>> params;

  double param(const std::string& key, double fallback) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return fallback;
  }
};

SystemSpec read_system(Config& cfg) {
  SystemSpec spec;
  spec.name = cfg.text("system", "name");
  spec.params = cfg.rest_as_numbers("system");
  return spec;
}

SystemPtr build(const SystemSpec& spec) {
  std::vector<const char*> keys;
  std::vector<double> values;
  for (const auto& [k, v] : spec.params) {
    keys.push_back(k.c_str());
    values.push_back(v);
  }
  expent_system* sys = nullptr;
  check(expent_system_create(spec.name.c_str(), keys.size(), keys.data(), values.data(), &sys),
        "[system]");
  return SystemPtr(sys);
}

expent_integrator_config read_integrator(Config& cfg) {
  expent_integrator_config ic;
  expent_integrator_config_default(&ic);
  ic.rel_tol = cfg.number("integrator", "rel_tol", ic.rel_tol);
  ic.abs_tol = cfg.number("integrator", "abs_tol", ic.abs_tol);
  ic.max_step = cfg.number("integrator", "max_step", ic.max_step);
  ic.initial_step = cfg.number("integrator", "initial_step", ic.initial_step);
  ic.max_steps = cfg.count("integrator", "max_steps", ic.max_steps);
  return ic;
}

std::vector<std::string> state_names(const std::string& system, std::size_t dim) {
  if (system == "lj_reduced") return {"u1", "w1", "v1", "v2"};
  if (system == "double_pendulum") return {"theta1", "omega1", "theta2", "omega2"};
  if (system == "sprott_a") return {"x", "y", "z"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

// --- output --------------------------------------------------------------------

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV table to --out (or stdout); summary lines always to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& table() { return file_.is_open() ? file_ : std::cout; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) table() << (i ? "," : "") << cells[i];
    table() << '\n';
  }
  void summary(const std::string& key, const std::string& value) {
    if (!started_) {
      if (!file_.is_open()) std::cout << '\n';
      std::cout << "key,value\n";
      started_ = true;
    }
    std::cout << key << ',' << value << '\n';
  }
  void finish() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw ConfigError("writing the output file failed");
    }
    std::cout.flush();
  }

 private:
  std::ofstream file_;
  bool started_ = false;
};

std::string output_path(Config& cfg, const Overrides& o) {
  const std::string from_file = cfg.text("output", "path", "");
  return o.out.empty() ? from_file : o.out;
}

// --- initial states --------------------------------------------------------------

/// [orbit] initial = explicit state, or start = equilateral (lj_reduced only),
/// optionally with side_offset added to side a; offset is then added to the
/// state. Returns the state and, for equilateral starts, the rest state.
std::pair<std::vector<double>, std::vector<double>> read_start(Config& cfg,
                                                               const SystemSpec& spec,
                                                               std::size_t dim) {
  std::vector<double> state, rest;
  const std::string start = cfg.text("orbit", "start", "");
  if (cfg.has("orbit", "initial")) {
    if (!start.empty()) throw ConfigError(cfg.source() + ": [orbit] give either initial or start");
    state = cfg.list("orbit", "initial");
  } else if (start == "equilateral") {
    if (spec.name != "lj_reduced")
      throw ConfigError(cfg.source() + ": [orbit] start = equilateral needs system lj_reduced");
    expent_potential pot;
    expent_potential_default(&pot);
    pot.c1 = spec.param("c1", pot.c1);
    pot.c2 = spec.param("c2", pot.c2);
    pot.delta1 = spec.param("delta1", pot.delta1);
    pot.delta2 = spec.param("delta2", pot.delta2);
    expent_equilibrium eq;
    check(expent_equilateral(&pot, spec.param("A", 0.55), &eq), "[orbit] start");
    rest.resize(4);
    check(expent_equilibrium_state(&eq, rest.data()), "[orbit] start");
    const double da = cfg.number("orbit", "side_offset", 0.0);
    double coords[3];
    check(expent_sides_to_coords(eq.a + da, eq.b, eq.c, coords), "[orbit] side_offset");
    state = {coords[0], coords[1], 0.0, 0.0};
  } else if (start.empty()) {
    throw ConfigError(cfg.source() + ": [orbit] needs initial = ... or start = equilateral");
  } else {
    throw ConfigError(cfg.source() + ": [orbit] start: unknown value '" + start + "'");
  }
  if (cfg.has("orbit", "offset")) {
    const auto off = cfg.list("orbit", "offset");
    if (off.size() != state.size())
      throw ConfigError(cfg.source() + ": [orbit] offset has " + std::to_string(off.size()) +
                        " entries, the state has " + std::to_string(state.size()));
    for (std::size_t i = 0; i < off.size(); ++i) state[i] += off[i];
  }
  if (state.size() != dim)
    throw ConfigError(cfg.source() + ": [orbit] initial state has " +
                      std::to_string(state.size()) + " entries, system dimension is " +
                      std::to_string(dim));
  return {state, rest};
}

std::vector<double> orbit(const expent_system* sys, const expent_integrator_config& ic,
                          const std::vector<double>& p, double t_max, std::size_t intervals) {
  std::vector<double> rows((intervals + 1) * (p.size() + 1));
  check(expent_sample_orbit(sys, &ic, p.data(), t_max, intervals, rows.data()), "orbit");
  return rows;
}

// --- commands --------------------------------------------------------------------

int cmd_simulate(Config& cfg, const Overrides& o) {
  const SystemSpec spec = read_system(cfg);
  const auto ic = read_integrator(cfg);
  const double t_max = cfg.number("orbit", "t_max");
  const auto intervals = cfg.count("orbit", "intervals", 1000);
  const std::string path = output_path(cfg, o);
  const SystemPtr sys = build(spec);
  const std::size_t n = expent_system_dim(sys.get());
  const auto [p, rest] = read_start(cfg, spec, n);
  cfg.reject_unread();
  if (!(t_max > 0) || intervals == 0)
    throw ConfigError(cfg.source() + ": [orbit] needs t_max > 0 and intervals > 0");

  const auto rows = orbit(sys.get(), ic, p, t_max, intervals);
  Output out(path);
  std::vector<std::string> header{"t"};
  for (const auto& name : state_names(spec.name, n)) header.push_back(name);
  out.row(header);

  double e0 = NAN, drift = 0, far = 0;
  const bool energy = expent_system_energy(sys.get(), p.data(), &e0) == EXPENT_OK;
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double* r = &rows[k * (n + 1)];
    std::vector<std::string> cells;
    for (std::size_t i = 0; i <= n; ++i) cells.push_back(num(r[i]));
    out.row(cells);
    if (energy) {
      double e = 0;
      check(expent_system_energy(sys.get(), r + 1, &e), "energy");
      drift = std::max(drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
    }
    if (!rest.empty()) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d += (r[i + 1] - rest[i]) * (r[i + 1] - rest[i]);
      far = std::max(far, std::sqrt(d));
    }
  }
  out.summary("system", spec.name);
  out.summary("t_max", num(t_max));
  out.summary("samples", std::to_string(intervals + 1));
  if (energy) {
    out.summary("energy_initial", num(e0));
    out.summary("energy_drift_max_rel", num(drift));
  }
  if (!rest.empty()) out.summary("max_distance_from_equilibrium", num(far));
  out.finish();
  return 0;
}

int cmd_perturb(Config& cfg, const Overrides& o) {
  const SystemSpec spec = read_system(cfg);
  const auto ic = read_integrator(cfg);
  const double t_max = cfg.number("orbit", "t_max");
  const auto intervals = cfg.count("orbit", "intervals", 1000);
  const double threshold = cfg.number("perturb", "threshold", 0.5);
  const std::string path = output_path(cfg, o);
  const SystemPtr sys = build(spec);
  const std::size_t n = expent_system_dim(sys.get());
  const auto [p, rest] = read_start(cfg, spec, n);
  const auto delta = cfg.list("perturb", "delta");
  cfg.reject_unread();
  if (delta.size() != n)
    throw ConfigError(cfg.source() + ": [perturb] delta needs " + std::to_string(n) + " entries");
  if (!(t_max > 0) || intervals == 0)
    throw ConfigError(cfg.source() + ": [orbit] needs t_max > 0 and intervals > 0");

  std::vector<double> q = p;
  for (std::size_t i = 0; i < n; ++i) q[i] += delta[i];
  const auto a = orbit(sys.get(), ic, p, t_max, intervals);
  const auto b = orbit(sys.get(), ic, q, t_max, intervals);

  Output out(path);
  std::vector<std::string> header{"t"};
  const auto names = state_names(spec.name, n);
  for (const auto& name : names) header.push_back(name);
  for (const auto& name : names) header.push_back(name + "_perturbed");
  header.push_back("separation");
  out.row(header);
  double first = NAN, worst = 0;
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double* ra = &a[k * (n + 1)];
    const double* rb = &b[k * (n + 1)];
    std::vector<std::string> cells{num(ra[0])};
    double d = 0;
    for (std::size_t i = 1; i <= n; ++i) cells.push_back(num(ra[i]));
    for (std::size_t i = 1; i <= n; ++i) {
      cells.push_back(num(rb[i]));
      d += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    }
    d = std::sqrt(d);
    cells.push_back(num(d));
    out.row(cells);
    worst = std::max(worst, d);
    if (std::isnan(first) && d > threshold) first = ra[0];
  }
  out.summary("system", spec.name);
  out.summary("initial_separation", num(a.empty() ? 0 : std::sqrt([&] {
    double s = 0;
    for (double x : delta) s += x * x;
    return s;
  }())));
  out.summary("max_separation", num(worst));
  out.summary("threshold", num(threshold));
  out.summary("first_time_above_threshold", std::isnan(first) ? "none" : num(first));
  out.finish();
  return 0;
}

int cmd_entropy(Config& cfg, const Overrides& o) {
  const SystemSpec spec = read_system(cfg);
  const auto ic = read_integrator(cfg);
  const auto lower = cfg.list("region", "lower");
  const auto upper = cfg.list("region", "upper");
  expent_entropy_config ec{};
  ec.lower = lower.data();
  ec.upper = upper.data();
  ec.points_per_sample = cfg.count("entropy", "points", 1000);
  ec.samples = cfg.count("entropy", "samples", 10);
  const std::uint64_t file_seed = cfg.count("entropy", "seed", 1);
  ec.seed = o.seed ? *o.seed : file_seed;
  ec.fit_window = cfg.number("entropy", "fit_window", 0.5);
  ec.threads = o.threads ? *o.threads : static_cast<unsigned>(cfg.count("entropy", "threads", 0));
  std::vector<double> grid;
  if (cfg.has("entropy", "t_grid")) {
    grid = cfg.list("entropy", "t_grid");
  } else {
    const double t_max = cfg.number("entropy", "t_max", 30.0);
    const auto t_points = cfg.count("entropy", "t_points", 60);
    if (!(t_max > 0) || t_points == 0)
      throw ConfigError(cfg.source() + ": [entropy] needs t_max > 0 and t_points > 0");
    for (std::uint64_t k = 1; k <= t_points; ++k)
      grid.push_back(k == t_points ? t_max : t_max * static_cast<double>(k) / t_points);
  }
  ec.t_grid = grid.data();
  ec.t_count = grid.size();
  const std::string path = output_path(cfg, o);
  const SystemPtr sys = build(spec);
  cfg.reject_unread();
  const std::size_t n = expent_system_dim(sys.get());
  if (lower.size() != n || upper.size() != n)
    throw ConfigError(cfg.source() + ": [region] bounds need " + std::to_string(n) +
                      " entries each");

  const auto t0 = std::chrono::steady_clock::now();
  expent_entropy_result* raw = nullptr;
  check(expent_entropy_run(sys.get(), &ic, &ec, &raw), "entropy");
  std::unique_ptr<expent_entropy_result, EntropyDeleter> res(raw);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Output out(path);
  out.row({"T", "mean_lnE", "var_lnE", "mean_retained"});
  for (std::size_t i = 0; i < expent_entropy_result_rows(res.get()); ++i) {
    expent_entropy_row row;
    check(expent_entropy_result_row(res.get(), i, &row), "entropy");
    out.row({num(row.t), num(row.mean_log_e), num(row.var_log_e), num(row.mean_retained)});
  }
  for (std::size_t i = 0; i < expent_entropy_result_warning_count(res.get()); ++i)
    std::cerr << "warning: " << expent_entropy_result_warning(res.get(), i) << '\n';

  double slope = NAN, se = NAN;
  const bool fitted = expent_entropy_result_slope(res.get(), &slope, &se) == EXPENT_OK;
  const std::string fit_error = fitted ? "" : expent_last_error();
  out.summary("slope", num(slope));
  out.summary("stderr", num(se));
  out.summary("N", std::to_string(ec.points_per_sample));
  out.summary("n_samples", std::to_string(ec.samples));
  out.summary("seed", std::to_string(ec.seed));
  out.summary("failed_points", std::to_string(expent_entropy_result_failed_points(res.get())));
  out.summary("wall_time_s", num(wall));
  out.finish();
  if (!fitted) throw NumericalFailure("slope fit: " + fit_error);
  return 0;
}

int cmd_equilibria(Config& cfg, const Overrides& o) {
  expent_potential pot;
  expent_potential_default(&pot);
  pot.c1 = cfg.number("potential", "c1", pot.c1);
  pot.c2 = cfg.number("potential", "c2", pot.c2);
  pot.delta1 = cfg.number("potential", "delta1", pot.delta1);
  pot.delta2 = cfg.number("potential", "delta2", pot.delta2);
  const double a_min = cfg.number("equilibria", "area_min");
  const double a_max = cfg.number("equilibria", "area_max");
  const double step = cfg.number("equilibria", "area_step");
  const std::string path = output_path(cfg, o);
  cfg.reject_unread();

  expent_equilibrium_table* raw = nullptr;
  check(expent_equilibrium_scan(&pot, a_min, a_max, step, &raw), "[equilibria]");
  std::unique_ptr<expent_equilibrium_table, TableDeleter> table(raw);

  static const char* kinds[] = {"equilateral", "isosceles", "scalene"};
  static const char* stab[] = {"stable", "unstable", "marginal"};
  Output out(path);
  out.row({"A", "kind", "a", "b", "c", "lambda", "stable", "multiplicity"});
  for (std::size_t i = 0; i < expent_equilibrium_table_rows(table.get()); ++i) {
    expent_equilibrium e;
    check(expent_equilibrium_table_row(table.get(), i, &e), "[equilibria]");
    out.row({num(e.area), kinds[e.kind], num(e.a), num(e.b), num(e.c), num(e.lambda),
             stab[e.stability], std::to_string(e.multiplicity)});
  }
  double a0 = NAN;
  if (expent_critical_area(&pot, 1e-3, 1e3, &a0) == EXPENT_OK)
    out.summary("A0", num(a0));
  else
    std::cerr << "warning: critical area: " << expent_last_error() << '\n';
  out.summary("rows", std::to_string(expent_equilibrium_table_rows(table.get())));
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expansion-entropy chaos detection and the three-particle Lennard-Jones system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(expent_version()));

  Overrides o;
  int (*handler)(Config&, const Overrides&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(Config&, const Overrides&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "CSV output path (default: stdout)");
    sub->add_option("--seed", o.seed, "master seed (entropy)");
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores (entropy)");
    sub->callback([&, fn] { handler = fn; });
  };
  add("simulate", "integrate one orbit and write it as CSV", cmd_simulate);
  add("perturb", "integrate an orbit and a perturbed copy, with their separation", cmd_perturb);
  add("entropy", "estimate ln E_T over a time grid and fit the expansion entropy", cmd_entropy);
  add("equilibria", "scan equilibria over a range of areas", cmd_equilibria);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Config cfg = Config::load(o.config);
    return handler(cfg, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
