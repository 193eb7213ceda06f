#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "hypercolor/metrics.hpp"
#include "hypercolor/random.hpp"
#include "hypercolor/synthetic.hpp"
#include "test_support.hpp"

using namespace hypercolor;

namespace {

HyperCube with_noise(const HyperCube& c, double sigma, std::uint64_t seed) {
  HyperCube out = c;
  CounterRng rng(seed, 0x401, 0);
  for (double& v : out.data()) v += sigma * sample_standard_normal(rng);
  return out;
}

}  // namespace

TEST(Psnr, ClosedForms) {
  const auto truth = hctest::random_cube(8, 8, 4, 1);
  EXPECT_TRUE(std::isinf(psnr(truth, truth)));
  EXPECT_EQ(format_number(psnr(truth, truth)), "inf");

  HyperCube unit(3, 3, linear_wavelengths(2));
  unit.at(1, 1, 0) = 1.0;
  HyperCube off = unit;
  for (double& v : off.data()) v -= 0.01;
  EXPECT_NEAR(psnr(off, unit), 40.0, 1e-9);

  const auto recon = with_noise(truth, 0.05, 2);
  HyperCube t2 = truth, r2 = recon;
  for (double& v : t2.data()) v *= 2;
  for (double& v : r2.data()) v *= 2;
  EXPECT_NEAR(psnr(r2, t2), psnr(recon, truth), 1e-10);
}

TEST(Ssim, IdentityAndOffset) {
  const auto truth = hctest::random_cube(16, 16, 3, 3);
  EXPECT_NEAR(ssim(truth, truth), 1.0, 1e-12);
  HyperCube bright = truth;
  for (double& v : bright.data()) v += 0.5;
  EXPECT_LT(ssim(bright, truth), 1.0);
  const double s = ssim(with_noise(truth, 0.3, 1), truth);
  EXPECT_GE(s, -1.0);
  EXPECT_LE(s, 1.0);
}

TEST(Gfc, Examples) {
  const std::vector<double> a{0.1, 0.4, 0.3}, b{0.2, 0.8, 0.6};
  EXPECT_NEAR(*gfc_spectra(a, a), 1.0, 1e-15);
  EXPECT_NEAR(*gfc_spectra(b, a), 1.0, 1e-15);
  EXPECT_EQ(*gfc_spectra(std::vector<double>{1, 0, 0}, std::vector<double>{0, 0, 2}), 0.0);
  EXPECT_FALSE(gfc_spectra(a, std::vector<double>{0, 0, 0}).has_value());

  HyperCube truth(1, 2, {400, 500, 600}, {0.1, 0.4, 0.3, 0, 0, 0});
  std::size_t skipped = 0;
  EXPECT_NEAR(gfc(truth, truth, &skipped), 1.0, 1e-15);
  EXPECT_EQ(skipped, 1u);
}

TEST(Ssv, Examples) {
  const std::vector<double> a{0.1, 0.4, 0.3, 0.9};
  EXPECT_EQ(*ssv_spectra(a, a), 0.0);
  std::vector<double> shifted = a;
  for (double& v : shifted) v += 0.3;
  EXPECT_NEAR(*ssv_spectra(shifted, a), 0.3, 1e-12);
  // Anti-correlated equal magnitude: r = -1 leaves only the RMSE.
  const std::vector<double> up{0.1, 0.3, 0.5, 0.7}, down{0.7, 0.5, 0.3, 0.1};
  const double rmse = std::sqrt((0.36 + 0.04 + 0.04 + 0.36) / 4);
  EXPECT_NEAR(*ssv_spectra(down, up), rmse, 1e-12);
  // Uncorrelated shapes: r = 0, so the correlation term contributes 1.
  const std::vector<double> x{1, 0, 1, 0}, y{1, 1, 0, 0};
  const double rmse_xy = std::sqrt(0.5);
  EXPECT_NEAR(*ssv_spectra(x, y), std::sqrt(rmse_xy * rmse_xy + 1.0), 1e-12);
  // Constant spectra use r = 1.
  EXPECT_NEAR(*ssv_spectra(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.2}), 0.3, 1e-12);
}

TEST(Emd, Examples) {
  const std::vector<double> d0{1, 0, 0, 0}, d2{0, 0, 1, 0};
  EXPECT_NEAR(*emd_spectra(d0, d2), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(*emd_spectra(d2, d2), 0.0);
  // Scale does not matter, negatives are clamped.
  EXPECT_NEAR(*emd_spectra(std::vector<double>{5, -1, 0, 0}, d2), 2.0 / 3.0, 1e-15);
  EXPECT_FALSE(emd_spectra(std::vector<double>{0, -1, 0, 0}, d2).has_value());
}

TEST(Emd, SymmetricTriangleAndBounded) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = hctest::random_values(9, 3 * s + 1);
    const auto b = hctest::random_values(9, 3 * s + 2);
    const auto c = hctest::random_values(9, 3 * s + 3);
    const double ab = *emd_spectra(a, b), ba = *emd_spectra(b, a);
    EXPECT_NEAR(ab, ba, 1e-15);
    EXPECT_LE(ab, *emd_spectra(a, c) + *emd_spectra(c, b) + 1e-15);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Emd, PerPixelSkipsEmptySpectra) {
  HyperCube truth(1, 2, {400, 500}, {1, 0, 0, 0});
  const auto per = emd_per_pixel(truth, truth);
  EXPECT_EQ(per[0], 0.0);
  EXPECT_TRUE(std::isnan(per[1]));
  std::size_t skipped = 0;
  EXPECT_EQ(emd(truth, truth, &skipped), 0.0);
  EXPECT_EQ(skipped, 1u);
}

TEST(Report, IdenticalCubes) {
  const auto truth = hctest::random_cube(12, 12, 5, 9);
  const auto r = report(truth, truth);
  EXPECT_TRUE(std::isinf(r.psnr));
  EXPECT_NEAR(r.ssim, 1.0, 1e-12);
  EXPECT_NEAR(r.gfc, 1.0, 1e-15);
  EXPECT_EQ(r.ssv, 0.0);
  EXPECT_EQ(r.emd, 0.0);
  const auto j = r.to_json();
  EXPECT_EQ(j["psnr"], "inf");
}

TEST(Report, FieldsFiniteOnRandomInput) {
  const auto truth = hctest::random_cube(12, 12, 5, 9);
  const auto r = report(hctest::random_cube(12, 12, 5, 10), truth, 3.5);
  for (double v : {r.psnr, r.ssim, r.gfc, r.ssv, r.emd}) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(r.wall_ms, 3.5);
  EXPECT_EQ(r.pixels, 144u);
  const auto j = r.to_json();
  for (const char* key : {"psnr", "ssim", "gfc", "ssv", "emd", "wall_ms"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Metrics, MonotoneUnderNoise) {
  const auto truth = natural_scene(32, 32, 8, 4);
  double last_psnr = std::numeric_limits<double>::infinity(), last_emd = 0.0;
  for (double sigma : {0.01, 0.03, 0.1}) {
    const auto noisy = with_noise(truth, sigma, 7);
    const double p = psnr(noisy, truth), e = emd(noisy, truth);
    EXPECT_LT(p, last_psnr);
    EXPECT_GT(e, last_emd);
    last_psnr = p;
    last_emd = e;
  }
}

TEST(Metrics, PixelPermutationInvariance) {
  const auto truth = hctest::random_cube(4, 5, 6, 1);
  const auto recon = hctest::random_cube(4, 5, 6, 2);
  // Reverse pixel order.
  HyperCube t2(4, 5, linear_wavelengths(6)), r2(4, 5, linear_wavelengths(6));
  for (std::size_t p = 0; p < 20; ++p) {
    std::copy(truth.spectrum(p).begin(), truth.spectrum(p).end(), t2.spectrum(19 - p).begin());
    std::copy(recon.spectrum(p).begin(), recon.spectrum(p).end(), r2.spectrum(19 - p).begin());
  }
  EXPECT_NEAR(gfc(r2, t2), gfc(recon, truth), 1e-14);
  EXPECT_NEAR(ssv(r2, t2), ssv(recon, truth), 1e-14);
  EXPECT_NEAR(emd(r2, t2), emd(recon, truth), 1e-14);
  EXPECT_NEAR(psnr(r2, t2), psnr(recon, truth), 1e-12);
}

TEST(PairwiseSum, MatchesNaiveAndIsStable) {
  const auto v = hctest::random_values(1001, 4);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(pairwise_sum(v), naive, 1e-10);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-7), "1e-07");
}
