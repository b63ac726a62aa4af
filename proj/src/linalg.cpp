#include "expent/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "expent/error.hpp"

namespace expent {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols,
                         std::span<const double> data) {
  if (data.size() != rows * cols)
    throw std::invalid_argument("Matrix::from_rows: size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols_ != rhs.rows_) throw std::invalid_argument("Matrix product: size mismatch");
  Matrix out(lhs.rows_, rhs.cols_);
  for (std::size_t i = 0; i < lhs.rows_; ++i)
    for (std::size_t k = 0; k < lhs.cols_; ++k) {
      const double a = lhs(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Matrix operator+(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows_ != rhs.rows_ || lhs.cols_ != rhs.cols_)
    throw std::invalid_argument("Matrix sum: size mismatch");
  Matrix out = lhs;
  for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

Matrix operator-(const Matrix& lhs, const Matrix& rhs) { return lhs + (-1.0) * rhs; }

Matrix operator*(double s, const Matrix& m) {
  Matrix out = m;
  for (double& v : out.data_) v *= s;
  return out;
}

std::vector<double> multiply(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw std::invalid_argument("multiply: size mismatch");
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

std::vector<double> singular_values(const Matrix& m, double tol) {
  if (m.rows() < m.cols())
    return singular_values(m.transposed(), tol);

  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  // Squared column norms overflow past ~1e154, so scale by a power of two
  // (exact) to bring the largest entry near 1.
  double largest = 0.0;
  for (double v : m.data()) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) return std::vector<double>(cols, 0.0);
  const int shift = std::ilogb(largest);

  // Work on columns stored contiguously.
  std::vector<double> a(rows * cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) a[j * rows + i] = std::ldexp(m(i, j), -shift);
  auto col = [&](std::size_t j) { return a.data() + j * rows; };

  constexpr int kMaxSweeps = 80;
  bool rotated = true;
  for (int sweep = 0; sweep < kMaxSweeps && rotated; ++sweep) {
    rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double* ap = col(p);
        double* aq = col(q);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += ap[i] * ap[i];
          beta += aq[i] * aq[i];
          gamma += ap[i] * aq[i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double x = ap[i];
          const double y = aq[i];
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
      }
    }
  }
  if (rotated) throw NumericalError("singular_values: Jacobi sweeps did not converge");

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double ss = 0.0;
    const double* aj = col(j);
    for (std::size_t i = 0; i < rows; ++i) ss += aj[i] * aj[i];
    sigma[j] = std::ldexp(std::sqrt(ss), shift);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

std::vector<double> solve(Matrix m, std::vector<double> b, double pivot_tol) {
  const std::size_t n = m.rows();
  if (!m.square() || b.size() != n) throw std::invalid_argument("solve: size mismatch");
  double scale = 0.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw SingularSystemError("solve: zero matrix");

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (std::abs(m(piv, k)) <= pivot_tol * scale)
      throw SingularSystemError("solve: matrix is singular to working precision");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * b[j];
    b[k] = s / m(k, k);
  }
  return b;
}

std::pair<double, double> symmetric_eigenvalues_2x2(double a11, double a12, double a22) {
  const double mean = 0.5 * (a11 + a22);
  const double radius = std::hypot(0.5 * (a11 - a22), a12);
  return {mean - radius, mean + radius};
}

}  // namespace expent
