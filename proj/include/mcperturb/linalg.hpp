#pragma once

#include <cstddef>
#include <vector>

namespace mcperturb {

// Dense row-major matrix. Small chains only, so no sparsity and no views;
// everything is plain doubles with bounds enforced at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);

// Row vector times matrix: (v A)_j = sum_i v_i A(i, j). This is how
// distributions evolve under a kernel.
std::vector<double> left_apply(const std::vector<double>& v, const Matrix& a);

// Matrix times column vector: (A v)_i = sum_j A(i, j) v_j. This is how
// observables evolve.
std::vector<double> right_apply(const Matrix& a, const std::vector<double>& v);

double max_abs(const Matrix& a);

double dot(const std::vector<double>& a, const std::vector<double>& b);

// Solves A x = b by Gaussian elimination with partial pivoting. Throws
// NotConvergedError when a pivot collapses below 1e-300.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

}  // namespace mcperturb
