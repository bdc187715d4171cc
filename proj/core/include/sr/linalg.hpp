#pragma once

#include <vector>

namespace sr {

/// Dense row-major matrix in working precision. The measurement
/// instrument of the conditioning experiments, never itself quantized
/// storage: entries are plain doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(int rows, int cols);
  Matrix(int rows, int cols, std::vector<double> entries);

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return data[static_cast<size_t>(i) * cols + j];
  }

  std::vector<double> column(int j) const;

  bool operator==(const Matrix&) const = default;
};

double frobenius_norm(const Matrix& a);
Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

/// All singular values of a tall matrix, descending, via one-sided Jacobi
/// iterated to an off-diagonal Gram ratio below 1e-13 (at most 30 sweeps,
/// NonConvergence afterwards). ShapeError unless rows >= cols and
/// cols <= 64.
std::vector<double> singular_values(const Matrix& a);

/// Smallest singular value (last entry of singular_values).
double sigma_min(const Matrix& a);

/// Least-squares minimizer of ||Ax - b|| by Householder QR. RankDeficient
/// when a triangular pivot falls below 1e-13 * ||A||_F.
std::vector<double> lls_solve(const Matrix& a, const std::vector<double>& b);

}  // namespace sr
