#include "expent/systems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "expent/error.hpp"

namespace expent {

SystemDef::SystemDef(std::string name, std::size_t dim, Rhs rhs, Jacobian jacobian,
                     Energy energy, Domain domain)
    : name_(std::move(name)),
      dim_(dim),
      rhs_(std::move(rhs)),
      jacobian_(std::move(jacobian)),
      energy_(std::move(energy)),
      domain_(std::move(domain)) {
  if (dim_ == 0) throw std::invalid_argument("SystemDef: dimension must be positive");
  if (!rhs_ || !jacobian_) throw std::invalid_argument("SystemDef: rhs and jacobian are required");
}

void SystemDef::rhs(std::span<const double> x, std::span<double> dxdt) const {
  rhs_(x, dxdt);
}

State SystemDef::rhs(std::span<const double> x) const {
  State dx(dim_);
  rhs_(x, dx);
  return dx;
}

void SystemDef::jacobian(std::span<const double> x, Matrix& jac) const {
  if (jac.rows() != dim_ || jac.cols() != dim_) jac = Matrix(dim_, dim_);
  jacobian_(x, jac);
}

Matrix SystemDef::jacobian(std::span<const double> x) const {
  Matrix jac(dim_, dim_);
  jacobian_(x, jac);
  return jac;
}

double SystemDef::energy(std::span<const double> x) const {
  if (!energy_) throw std::logic_error("system '" + name_ + "' has no energy functional");
  return energy_(x);
}

Matrix finite_difference_jacobian(const SystemDef::Rhs& rhs, std::span<const double> x,
                                  double h) {
  const std::size_t n = x.size();
  Matrix jac(n, n);
  State xp(x.begin(), x.end());
  State fp(n), fm(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = h * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    rhs(xp, fp);
    xp[j] = x[j] - step;
    rhs(xp, fm);
    xp[j] = x[j];
    for (std::size_t i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

// ---------------------------------------------------------------------------
// Reduced Lennard-Jones system

void LJSystemParams::validate() const {
  potential.validate();
  if (!(mass > 0.0)) throw std::invalid_argument("lj_reduced: mass must be positive");
  if (!(area > 0.0)) throw std::invalid_argument("lj_reduced: area must be positive");
}

namespace {

// Geometry shared by rhs and Jacobian at one state.
struct LJTerms {
  double u1, w1, v2;
  double u2;       // 2A / w1
  double d;        // u1 - u2
  double r12, r1;
  double f12, f1;  // phi'(r)/r
};

LJTerms lj_terms(const LJSystemParams& p, std::span<const double> x) {
  LJTerms t{};
  t.u1 = x[0];
  t.w1 = x[1];
  t.v2 = x[3];
  if (!(t.w1 > kMinHeight))
    throw DomainError("lj_reduced: w1 = " + std::to_string(t.w1) + " is below the height floor");
  t.u2 = 2.0 * p.area / t.w1;
  t.d = t.u1 - t.u2;
  t.r12 = std::hypot(t.d, t.w1);
  t.r1 = std::hypot(t.u1, t.w1);
  t.f12 = dphi(p.potential, t.r12) / t.r12;
  t.f1 = dphi(p.potential, t.r1) / t.r1;
  return t;
}

// d/dr (phi'(r)/r)
double dratio(const PotentialParams& p, double r) {
  return (d2phi(p, r) - dphi(p, r) / r) / r;
}

}  // namespace

SystemDef lj_reduced(const LJSystemParams& params) {
  params.validate();
  const auto p = std::make_shared<const LJSystemParams>(params);

  auto rhs = [p](std::span<const double> x, std::span<double> dx) {
    const LJTerms t = lj_terms(*p, x);
    const double m = p->mass;
    const double a = p->area;
    const double w3 = t.w1 * t.w1 * t.w1;
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = (-t.f12 * t.d - t.f1 * t.u1) / m;
    const double num = 2.0 * a * (-t.f12 * t.d + dphi(p->potential, t.u2)) -
                       (t.f12 + t.f1) * w3 + 8.0 * m * a * a * t.v2 * t.v2 / w3;
    dx[3] = num / (m * (t.w1 * t.w1 + t.u2 * t.u2));
  };

  auto jacobian = [p](std::span<const double> x, Matrix& jac) {
    const LJTerms t = lj_terms(*p, x);
    const PotentialParams& pot = p->potential;
    const double m = p->mass;
    const double a = p->area;
    const double w1 = t.w1;
    const double w2 = w1 * w1;
    const double w3 = w2 * w1;

    const double du2_dw = -t.u2 / w1;
    // d(u1 - u2)/du1 = 1, d(u1 - u2)/dw1 = u2 / w1
    const double dd_dw = t.u2 / w1;
    const double dr12_du = t.d / t.r12;
    const double dr12_dw = (t.d * dd_dw + w1) / t.r12;
    const double dr1_du = t.u1 / t.r1;
    const double dr1_dw = w1 / t.r1;
    const double g12 = dratio(pot, t.r12);
    const double g1 = dratio(pot, t.r1);
    const double df12_du = g12 * dr12_du, df12_dw = g12 * dr12_dw;
    const double df1_du = g1 * dr1_du, df1_dw = g1 * dr1_dw;

    for (double& v : jac.data()) v = 0.0;
    jac(0, 2) = 1.0;
    jac(1, 3) = 1.0;

    jac(2, 0) = -(df12_du * t.d + t.f12 + df1_du * t.u1 + t.f1) / m;
    jac(2, 1) = -(df12_dw * t.d + t.f12 * dd_dw + df1_dw * t.u1) / m;

    const double phi_u2 = dphi(pot, t.u2);
    const double num = 2.0 * a * (-t.f12 * t.d + phi_u2) - (t.f12 + t.f1) * w3 +
                       8.0 * m * a * a * t.v2 * t.v2 / w3;
    const double den = m * (w2 + t.u2 * t.u2);
    const double dnum_du = 2.0 * a * (-df12_du * t.d - t.f12) - (df12_du + df1_du) * w3;
    const double dnum_dw = 2.0 * a * (-df12_dw * t.d - t.f12 * dd_dw + d2phi(pot, t.u2) * du2_dw) -
                           (df12_dw + df1_dw) * w3 - 3.0 * (t.f12 + t.f1) * w2 -
                           24.0 * m * a * a * t.v2 * t.v2 / (w3 * w1);
    const double dnum_dv2 = 16.0 * m * a * a * t.v2 / w3;
    const double dden_dw = 2.0 * m * (w1 + t.u2 * du2_dw);

    jac(3, 0) = dnum_du / den;
    jac(3, 1) = (dnum_dw * den - num * dden_dw) / (den * den);
    jac(3, 3) = dnum_dv2 / den;
  };

  auto energy = [p](std::span<const double> x) { return lj_energy(*p, x); };
  auto domain = [](std::span<const double> x) { return x[1] > kMinHeight; };
  return SystemDef("lj_reduced", 4, rhs, jacobian, energy, domain);
}

double lj_energy(const LJSystemParams& params, std::span<const double> state) {
  const double u1 = state[0], w1 = state[1], v1 = state[2], v2 = state[3];
  if (!(w1 > 0.0)) throw DomainError("lj_energy: w1 must be positive");
  const double a = params.area;
  const double u2 = 2.0 * a / w1;
  const double u2_dot = -2.0 * a * v2 / (w1 * w1);
  const double kinetic = 0.5 * params.mass * (v1 * v1 + v2 * v2 + u2_dot * u2_dot);
  const PotentialParams& pot = params.potential;
  const double potential = phi(pot, std::hypot(u1 - u2, w1)) + phi(pot, std::hypot(u1, w1)) +
                           phi(pot, u2);
  return kinetic + potential;
}

// ---------------------------------------------------------------------------
// Benchmarks

SystemDef linear_system(const Matrix& m) {
  if (!m.square() || m.rows() == 0)
    throw std::invalid_argument("linear_system: matrix must be square and non-empty");
  const auto coeffs = std::make_shared<const Matrix>(m);
  auto rhs = [coeffs](std::span<const double> x, std::span<double> dx) {
    const Matrix& a = *coeffs;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
      dx[i] = s;
    }
  };
  auto jacobian = [coeffs](std::span<const double>, Matrix& jac) { jac = *coeffs; };
  return SystemDef("linear", m.rows(), rhs, jacobian);
}

SystemDef sprott_a() {
  auto rhs = [](std::span<const double> x, std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = -x[0] + x[1] * x[2];
    dx[2] = 1.0 - x[1] * x[1];
  };
  auto jacobian = [](std::span<const double> x, Matrix& jac) {
    jac(0, 0) = 0.0;  jac(0, 1) = 1.0;          jac(0, 2) = 0.0;
    jac(1, 0) = -1.0; jac(1, 1) = x[2];         jac(1, 2) = x[1];
    jac(2, 0) = 0.0;  jac(2, 1) = -2.0 * x[1];  jac(2, 2) = 0.0;
  };
  return SystemDef("sprott_a", 3, rhs, jacobian);
}

void PendulumParams::validate() const {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(l1 > 0.0) || !(l2 > 0.0) || !(g > 0.0))
    throw std::invalid_argument("double_pendulum: masses, lengths and g must be positive");
}

std::pair<double, double> pendulum_tensions(const PendulumParams& p,
                                            std::span<const double> s) {
  const double th1 = s[0], om1 = s[1], th2 = s[2], om2 = s[3];
  const double cs = std::cos(th2 - th1);
  const double a11 = 1.0 / p.m1;
  const double a12 = -cs / p.m1;
  const double a22 = 1.0 / p.m1 + 1.0 / p.m2;
  const double det = a11 * a22 - a12 * a12;
  if (std::abs(det) < 1e-14) throw NumericalError("double_pendulum: singular tension matrix");
  const double r1 = p.l1 * om1 * om1 + p.g * std::cos(th1);
  const double r2 = p.l2 * om2 * om2;
  return {(a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det};
}

double pendulum_energy(const PendulumParams& p, std::span<const double> s) {
  const double th1 = s[0], om1 = s[1], th2 = s[2], om2 = s[3];
  const double kinetic =
      0.5 * p.m1 * p.l1 * p.l1 * om1 * om1 +
      0.5 * p.m2 *
          (p.l1 * p.l1 * om1 * om1 + p.l2 * p.l2 * om2 * om2 +
           2.0 * p.l1 * p.l2 * om1 * om2 * std::cos(th1 - th2));
  const double potential = -(p.m1 + p.m2) * p.g * p.l1 * std::cos(th1) -
                           p.m2 * p.g * p.l2 * std::cos(th2);
  return kinetic + potential;
}

SystemDef double_pendulum(const PendulumParams& params) {
  params.validate();
  const PendulumParams p = params;
  SystemDef::Rhs rhs = [p](std::span<const double> s, std::span<double> ds) {
    const auto [t1, t2] = pendulum_tensions(p, s);
    const double sn = std::sin(s[2] - s[0]);
    ds[0] = s[1];
    ds[1] = (t2 / p.m1 * sn - p.g * std::sin(s[0])) / p.l1;
    ds[2] = s[3];
    ds[3] = -(t1 / p.m1) * sn / p.l2;
  };
  auto jacobian = [rhs](std::span<const double> s, Matrix& jac) {
    jac = finite_difference_jacobian(rhs, s, 1e-6);
  };
  auto energy = [p](std::span<const double> s) { return pendulum_energy(p, s); };
  return SystemDef("double_pendulum", 4, rhs, jacobian, energy);
}

// ---------------------------------------------------------------------------
// Registry

namespace {

class ParamReader {
 public:
  ParamReader(std::string_view system, const ParamMap& params)
      : system_(system), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.push_back(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : params_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        throw std::invalid_argument("system '" + system_ + "': unknown parameter '" + key + "'");
    }
  }

 private:
  std::string system_;
  const ParamMap& params_;
  std::vector<std::string> used_;
};

}  // namespace

SystemDef make_system(std::string_view name, const ParamMap& params) {
  ParamReader in(name, params);
  if (name == "linear") {
    const double n_raw = in.get("n", 2.0);
    if (!(n_raw >= 1.0 && n_raw <= 9.0) || n_raw != std::floor(n_raw))
      throw std::invalid_argument("system 'linear': n must be an integer in [1, 9]");
    const auto n = static_cast<std::size_t>(n_raw);
    // Default coefficients: the symmetric 2x2 matrix with eigenvalues -1 and 0.1.
    const double defaults[2][2] = {{-0.45, -0.55}, {-0.55, -0.45}};
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double fallback = n == 2 ? defaults[i][j] : 0.0;
        m(i, j) = in.get("a" + std::to_string(i + 1) + std::to_string(j + 1), fallback);
      }
    in.reject_unknown();
    return linear_system(m);
  }
  if (name == "sprott_a") {
    in.reject_unknown();
    return sprott_a();
  }
  if (name == "double_pendulum") {
    PendulumParams p;
    p.m1 = in.get("m1", p.m1);
    p.m2 = in.get("m2", p.m2);
    p.l1 = in.get("l1", p.l1);
    p.l2 = in.get("l2", p.l2);
    p.g = in.get("g", p.g);
    in.reject_unknown();
    return double_pendulum(p);
  }
  if (name == "lj_reduced") {
    LJSystemParams p;
    p.potential.c1 = in.get("c1", p.potential.c1);
    p.potential.c2 = in.get("c2", p.potential.c2);
    p.potential.delta1 = in.get("delta1", p.potential.delta1);
    p.potential.delta2 = in.get("delta2", p.potential.delta2);
    p.mass = in.get("m", p.mass);
    p.area = in.get("A", p.area);
    in.reject_unknown();
    return lj_reduced(p);
  }
  throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

}  // namespace expent
