#include "sr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sr/errors.hpp"

namespace sr {
namespace {

constexpr int kJacobiMaxSweeps = 30;
constexpr double kJacobiTol = 1e-13;
constexpr double kRankTol = 1e-13;
constexpr int kDeskScaleCols = 64;

void check_finite(const Matrix& a, const char* who) {
  for (double v : a.data)
    if (!std::isfinite(v))
      raise(ErrorKind::InvalidInput, std::string(who) + ": non-finite entry");
}

}  // namespace

Matrix::Matrix(int rows_, int cols_)
    : rows(rows_), cols(cols_),
      data(static_cast<size_t>(rows_) * cols_, 0.0) {
  if (rows_ <= 0 || cols_ <= 0)
    raise(ErrorKind::ShapeError, "matrix dimensions must be positive");
}

Matrix::Matrix(int rows_, int cols_, std::vector<double> entries)
    : rows(rows_), cols(cols_), data(std::move(entries)) {
  if (rows_ <= 0 || cols_ <= 0)
    raise(ErrorKind::ShapeError, "matrix dimensions must be positive");
  if (data.size() != static_cast<size_t>(rows_) * cols_)
    raise(ErrorKind::ShapeError, "matrix data length does not match shape");
}

std::vector<double> Matrix::column(int j) const {
  std::vector<double> out(rows);
  for (int i = 0; i < rows; ++i) out[i] = at(i, j);
  return out;
}

double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data) sum += v * v;
  return std::sqrt(sum);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    raise(ErrorKind::ShapeError, "matmul: inner dimensions differ");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.cols)
    raise(ErrorKind::ShapeError, "matvec: vector length does not match cols");
  std::vector<double> y(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < a.cols; ++j) sum += a.at(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.rows < a.cols)
    raise(ErrorKind::ShapeError, "singular_values: need rows >= cols");
  if (a.cols > kDeskScaleCols)
    raise(ErrorKind::ShapeError, "singular_values: cols > 64 (desk scale)");
  check_finite(a, "singular_values");

  const int m = a.rows;
  const int n = a.cols;
  // Column-major working copy; Jacobi rotates column pairs in place.
  std::vector<std::vector<double>> g(n, std::vector<double>(m));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) g[j][i] = a.at(i, j);

  bool converged = (n == 1);
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    bool any_rotation = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += g[p][i] * g[p][i];
          aqq += g[q][i] * g[q][i];
          apq += g[p][i] * g[q][i];
        }
        if (app * aqq == 0.0) continue;  // zero column, already orthogonal
        if (std::abs(apq) <= kJacobiTol * std::sqrt(app * aqq)) continue;
        any_rotation = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double gp = g[p][i];
          const double gq = g[q][i];
          g[p][i] = c * gp - s * gq;
          g[q][i] = s * gp + c * gq;
        }
      }
    }
    converged = !any_rotation;
  }
  if (!converged)
    raise(ErrorKind::NonConvergence,
          "singular_values: Jacobi sweeps exhausted without convergence");

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += g[j][i] * g[j][i];
    sigma[j] = std::sqrt(sum);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

double sigma_min(const Matrix& a) { return singular_values(a).back(); }

std::vector<double> lls_solve(const Matrix& a, const std::vector<double>& b) {
  if (a.rows < a.cols)
    raise(ErrorKind::ShapeError, "lls_solve: need rows >= cols");
  if (static_cast<int>(b.size()) != a.rows)
    raise(ErrorKind::ShapeError, "lls_solve: rhs length does not match rows");
  check_finite(a, "lls_solve");

  const int m = a.rows;
  const int n = a.cols;
  const double norm_a = frobenius_norm(a);

  Matrix r = a;
  std::vector<double> rhs = b;

  for (int k = 0; k < n; ++k) {
    double norm_x = 0.0;
    for (int i = k; i < m; ++i) norm_x += r.at(i, k) * r.at(i, k);
    norm_x = std::sqrt(norm_x);
    if (norm_x < kRankTol * norm_a)
      raise(ErrorKind::RankDeficient,
            "lls_solve: pivot " + std::to_string(k) + " below rank tolerance");

    const double alpha = r.at(k, k) >= 0.0 ? -norm_x : norm_x;
    std::vector<double> v(m - k);
    v[0] = r.at(k, k) - alpha;
    for (int i = k + 1; i < m; ++i) v[i - k] = r.at(i, k);
    double vtv = 0.0;
    for (double vi : v) vtv += vi * vi;

    if (vtv > 0.0) {
      for (int j = k + 1; j < n; ++j) {
        double w = 0.0;
        for (int i = k; i < m; ++i) w += v[i - k] * r.at(i, j);
        w *= 2.0 / vtv;
        for (int i = k; i < m; ++i) r.at(i, j) -= w * v[i - k];
      }
      double w = 0.0;
      for (int i = k; i < m; ++i) w += v[i - k] * rhs[i];
      w *= 2.0 / vtv;
      for (int i = k; i < m; ++i) rhs[i] -= w * v[i - k];
    }
    r.at(k, k) = alpha;
    for (int i = k + 1; i < m; ++i) r.at(i, k) = 0.0;
  }

  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double sum = rhs[k];
    for (int j = k + 1; j < n; ++j) sum -= r.at(k, j) * x[j];
    x[k] = sum / r.at(k, k);
  }
  return x;
}

}  // namespace sr
