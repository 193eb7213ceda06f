#include "hypercolor/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypercolor/error.hpp"

// LAPACK band LU with partial pivoting.
extern "C" void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs, double* ab,
                       const int* ldab, int* ipiv, double* b, const int* ldb, int* info);

namespace hypercolor {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += values[k] * x[cols[k]];
    y[r] = acc;
  }
}

double SparseMatrix::diagonal(std::size_t row) const {
  for (std::size_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
    if (cols[k] == row) return values[k];
  }
  return 0.0;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(rows * rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) dense[r * rows + cols[k]] += values[k];
  }
  return dense;
}

SolveStats solve_bicgstab(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                          const SolverOptions& options) {
  const std::size_t n = a.rows;
  if (b.size() != n || x.size() != n) throw ParameterError("solver vector size mismatch");

  SolveStats stats;
  const double b_norm = norm(b);
  if (b_norm == 0.0) {
    std::ranges::fill(x, 0.0);
    return stats;
  }

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.diagonal(i);
    inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
  }

  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), z(n);
  auto true_residual = [&] {
    a.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm(r) / b_norm;
  };

  stats.residual = true_residual();
  if (stats.residual <= options.tolerance) return stats;

  // Outer loop restarts from the true residual when the recursive residual
  // drifts or the shadow vector degenerates.
  while (stats.iterations < options.max_iterations) {
    r_hat = r;
    double rho = 1.0;
    double alpha = 1.0;
    double omega = 1.0;
    std::ranges::fill(p, 0.0);
    std::ranges::fill(v, 0.0);
    bool restart = false;

    while (!restart && stats.iterations < options.max_iterations) {
      ++stats.iterations;
      const double rho_next = dot(r_hat, r);
      if (rho_next == 0.0 || !std::isfinite(rho_next)) break;
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (std::size_t i = 0; i < n; ++i) y[i] = inv_diag[i] * p[i];
      a.multiply(y, v);
      const double denom = dot(r_hat, v);
      if (denom == 0.0 || !std::isfinite(denom)) break;
      alpha = rho / denom;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      if (norm(s) / b_norm <= options.tolerance) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
        restart = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * s[i];
      a.multiply(z, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i] + omega * z[i];
      for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
      if (omega == 0.0) break;
      if (norm(r) / b_norm <= options.tolerance) restart = true;
    }

    stats.residual = true_residual();
    if (stats.residual <= options.tolerance) return stats;
  }
  throw NumericalError("BiCGSTAB did not converge in " + std::to_string(options.max_iterations) +
                           " iterations (relative residual " + std::to_string(stats.residual) + ")",
                       stats.residual);
}

std::vector<double> solve_dense(const SparseMatrix& a, std::span<const double> b) {
  const std::size_t n = a.rows;
  if (n > kDenseSolveLimit) {
    throw ParameterError("dense solve limited to " + std::to_string(kDenseSolveLimit) + " unknowns");
  }
  if (n == 0 || b.size() % n != 0) throw ParameterError("solver vector size mismatch");

  std::size_t lower = 0;
  std::size_t upper = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const std::size_t c = a.cols[k];
      if (c < r) lower = std::max(lower, r - c);
      if (c > r) upper = std::max(upper, c - r);
    }
  }
  // Column-major band storage with room for the fill-in of row pivoting.
  const std::size_t ld = 2 * lower + upper + 1;
  std::vector<double> band(ld * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const std::size_t c = a.cols[k];
      band[c * ld + (lower + upper + r - c)] += a.values[k];
    }
  }
  std::vector<double> x(b.begin(), b.end());
  std::vector<int> pivots(n);
  int n_i = static_cast<int>(n);
  int kl = static_cast<int>(lower);
  int ku = static_cast<int>(upper);
  int nrhs = static_cast<int>(b.size() / n);
  int ldab = static_cast<int>(ld);
  int ldb = n_i;
  int info = 0;
  dgbsv_(&n_i, &kl, &ku, &nrhs, band.data(), &ldab, pivots.data(), x.data(), &ldb, &info);
  if (info > 0) throw NumericalError("dense solve: matrix is singular");
  if (info < 0) throw ParameterError("dense solve: invalid argument " + std::to_string(-info));
  if (!std::ranges::all_of(x, [](double v) { return std::isfinite(v); })) {
    throw NumericalError("dense solve produced non-finite values");
  }
  return x;
}

}  // namespace hypercolor
