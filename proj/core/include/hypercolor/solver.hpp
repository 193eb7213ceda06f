#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hypercolor {

/// Compressed sparse row matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  std::size_t nonzeros() const noexcept { return values.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
  double diagonal(std::size_t row) const;
  /// Row-major dense copy (rows x rows).
  std::vector<double> to_dense() const;
};

struct SolverOptions {
  double tolerance = 1e-10;          ///< relative residual ||b - Ax|| / ||b||
  std::size_t max_iterations = 10000;
};

struct SolveStats {
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Jacobi-preconditioned BiCGSTAB. `x` holds the initial guess on entry.
/// Throws NumericalError carrying the achieved residual on non-convergence.
SolveStats solve_bicgstab(const SparseMatrix& a, std::span<const double> b, std::span<double> x,
                          const SolverOptions& options = {});

/// Largest system accepted by the dense path.
inline constexpr std::size_t kDenseSolveLimit = 64 * 64;

/// Direct LU with partial pivoting (LAPACK gbsv) on the dense band of the
/// matrix. Reference path for small systems; throws ParameterError above
/// kDenseSolveLimit unknowns. `b` may hold several right-hand sides back to
/// back; the result has the same layout.
std::vector<double> solve_dense(const SparseMatrix& a, std::span<const double> b);

}  // namespace hypercolor
