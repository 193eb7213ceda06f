#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "hypercolor/error.hpp"
#include "hypercolor/image_ops.hpp"
#include "test_support.hpp"

using namespace hypercolor;

namespace {

GuideImage checkerboard(std::size_t size, std::size_t block) {
  GuideImage g(size, size);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c) g.at(r, c) = ((r / block + c / block) % 2) ? 1.0 : 0.0;
  return g;
}

}  // namespace

TEST(Corners, ConstantImageHasNone) {
  EXPECT_TRUE(detect_corners(GuideImage(20, 20, 0.7)).empty());
}

TEST(Corners, SingleBrightPixel) {
  GuideImage g(21, 21, 0.0);
  g.at(10, 10) = 1.0;
  const auto corners = detect_corners(g);
  ASSERT_FALSE(corners.empty());
  EXPECT_TRUE(std::any_of(corners.begin(), corners.end(), [](PixelIndex p) {
    return p.row >= 9 && p.row <= 11 && p.col >= 9 && p.col <= 11;
  }));
}

TEST(Corners, CheckerboardLattice) {
  const auto g = checkerboard(64, 8);
  const auto corners = detect_corners(g);
  ASSERT_FALSE(corners.empty());
  std::size_t interior = 0;
  for (const auto& p : corners) {
    // Block intersections sit between pixels 8k-1 and 8k; the response is
    // flat over the few pixels whose window covers the whole junction.
    const auto near_line = [](std::uint32_t v) {
      const auto m = v % 8;
      return m >= 6 || m <= 1;
    };
    EXPECT_TRUE(near_line(p.row) && near_line(p.col)) << p.row << "," << p.col;
  }
  // Every one of the 7 x 7 interior intersections is found.
  for (std::uint32_t i = 8; i < 64; i += 8)
    for (std::uint32_t j = 8; j < 64; j += 8) {
      EXPECT_TRUE(std::any_of(corners.begin(), corners.end(), [&](PixelIndex p) {
        return p.row + 2 >= i && p.row <= i + 1 && p.col + 2 >= j && p.col <= j + 1;
      })) << i << "," << j;
      ++interior;
    }
  EXPECT_EQ(interior, 49u);
}

TEST(GaussianKernel, NormalizedAndSymmetric) {
  const auto k = gaussian_kernel(31, std::sqrt(11.0));
  double s = 0.0;
  for (double v : k) s += v;
  EXPECT_NEAR(s, 1.0, 1e-14);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_DOUBLE_EQ(k[i], k[30 - i]);
  EXPECT_NEAR(k[16] / k[15], std::exp(-1.0 / 22.0), 1e-12);
}

TEST(Canny, FindsStepEdge) {
  GuideImage g(32, 32, 0.2);
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 16; c < 32; ++c) g.at(r, c) = 0.8;
  const auto edges = canny(g);
  std::size_t on_edge = 0, elsewhere = 0;
  for (const auto& p : edges.indices()) (p.col >= 14 && p.col <= 17 ? on_edge : elsewhere) += 1;
  EXPECT_GE(on_edge, 28u);
  EXPECT_EQ(elsewhere, 0u);
}

TEST(EdgeWeights, RangeAndProfile) {
  GuideImage g(64, 64, 0.2);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 32; c < 64; ++c) g.at(r, c) = 0.8;
  const auto zeta = edge_weight_map(g);
  double mx = 0.0;
  for (double v : zeta.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    mx = std::max(mx, v);
  }
  EXPECT_DOUBLE_EQ(mx, 1.0);
  EXPECT_GT(zeta.at(32, 31) + zeta.at(32, 32), 1.0);
  EXPECT_LT(zeta.at(32, 5), 1e-6);
  const auto none = edge_weight_map(GuideImage(16, 16, 0.5));
  for (double v : none.data()) EXPECT_EQ(v, 0.0);
}

TEST(Posterize, SixteenLevels) {
  GuideImage g(1, 32);
  for (std::size_t c = 0; c < 32; ++c) g.at(0, c) = static_cast<double>(c);
  const auto q = posterize(g, 16);
  EXPECT_EQ(q.front(), 0);
  EXPECT_EQ(q.back(), 15);
  for (std::size_t c = 1; c < 32; ++c) EXPECT_GE(q[c], q[c - 1]);
}

TEST(Canny, RejectsBadParameters) {
  const GuideImage g(8, 8);
  CannyParams p;
  p.low_pct = 95.0;
  p.high_pct = 60.0;
  EXPECT_THROW(canny(g, p), ParameterError);
  p = {};
  p.sigma = 0.0;
  EXPECT_THROW(canny(g, p), ParameterError);
}
