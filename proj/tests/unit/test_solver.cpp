#include <gtest/gtest.h>

#include "hypercolor/error.hpp"
#include "hypercolor/solver.hpp"
#include "test_support.hpp"

using namespace hypercolor;

namespace {

// Tridiagonal [-1 3 -1] with a non-symmetric twist on the upper band.
SparseMatrix tridiagonal(std::size_t n) {
  SparseMatrix a;
  a.rows = n;
  a.row_ptr = {0};
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      a.cols.push_back(static_cast<std::uint32_t>(i - 1));
      a.values.push_back(-1.0);
    }
    a.cols.push_back(static_cast<std::uint32_t>(i));
    a.values.push_back(3.0);
    if (i + 1 < n) {
      a.cols.push_back(static_cast<std::uint32_t>(i + 1));
      a.values.push_back(-0.5);
    }
    a.row_ptr.push_back(a.values.size());
  }
  return a;
}

}  // namespace

TEST(SparseMatrix, MultiplyAndDense) {
  const auto a = tridiagonal(4);
  const std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y(4);
  a.multiply(x, y);
  EXPECT_EQ(y, (std::vector<double>{2.0, 3.5, 5.0, 9.0}));
  const auto d = a.to_dense();
  EXPECT_EQ(d[0 * 4 + 1], -0.5);
  EXPECT_EQ(d[1 * 4 + 0], -1.0);
  EXPECT_EQ(a.diagonal(2), 3.0);
}

TEST(Bicgstab, MatchesDenseOnNonSymmetricSystem) {
  const auto a = tridiagonal(50);
  const auto b = hctest::random_values(50, 3);
  std::vector<double> x(50, 0.0);
  const auto stats = solve_bicgstab(a, b, x);
  EXPECT_LE(stats.residual, 1e-10);
  const auto ref = solve_dense(a, b);
  EXPECT_LE(hctest::relative_error(x, ref), 1e-9);
}

TEST(Bicgstab, ZeroRightHandSide) {
  const auto a = tridiagonal(5);
  std::vector<double> x(5, 1.0);
  solve_bicgstab(a, std::vector<double>(5, 0.0), x);
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(DenseSolve, MultipleRightHandSides) {
  const auto a = tridiagonal(6);
  auto b = hctest::random_values(12, 5);
  const auto x = solve_dense(a, b);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> ax(6);
    a.multiply(std::span<const double>(x).subspan(6 * k, 6), ax);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(ax[i], b[6 * k + i], 1e-13);
  }
}

TEST(DenseSolve, RejectsLargeAndSingular) {
  EXPECT_THROW(solve_dense(tridiagonal(kDenseSolveLimit + 1),
                           std::vector<double>(kDenseSolveLimit + 1, 1.0)),
               ParameterError);
  SparseMatrix z;
  z.rows = 2;
  z.row_ptr = {0, 1, 2};
  z.cols = {0, 0};
  z.values = {1.0, 1.0};
  EXPECT_THROW(solve_dense(z, std::vector<double>{1, 1}), NumericalError);
}
