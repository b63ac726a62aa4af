#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace expent {

/// Dense row-major matrix. Sizes in this project never exceed 4x4 outside
/// the tests, so nothing here is tuned for large problems.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> entries);
  /// Builds from row-major data; data.size() must equal rows*cols.
  static Matrix from_rows(std::size_t rows, std::size_t cols,
                          std::span<const double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const;
  double trace() const;
  bool all_finite() const;

  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
  friend Matrix operator+(const Matrix& lhs, const Matrix& rhs);
  friend Matrix operator-(const Matrix& lhs, const Matrix& rhs);
  friend Matrix operator*(double s, const Matrix& m);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& m, std::span<const double> x);

/// Singular values of a (rows >= cols) matrix in descending order, by
/// one-sided Jacobi rotations. Columns are orthogonalized until every pair
/// satisfies |<a_i,a_j>| <= tol * |a_i| |a_j|.
std::vector<double> singular_values(const Matrix& m, double tol = 1e-12);

/// Solves m x = b by Gaussian elimination with partial pivoting.
/// Throws SingularSystemError when a pivot falls below
/// pivot_tol * max|m_ij|.
std::vector<double> solve(Matrix m, std::vector<double> b, double pivot_tol = 1e-14);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::pair<double, double> symmetric_eigenvalues_2x2(double a11, double a12, double a22);

}  // namespace expent
