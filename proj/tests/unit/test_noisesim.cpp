#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "hypercolor/error.hpp"
#include "hypercolor/noise.hpp"
#include "hypercolor/random.hpp"
#include "hypercolor/sampling.hpp"
#include "hypercolor/synthetic.hpp"
#include "test_support.hpp"

using namespace hypercolor;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

HyperCube flat_cube(std::size_t h, std::size_t w, double value) {
  return HyperCube(h, w, {500.0}, std::vector<double>(h * w, value));
}

}  // namespace

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatch) {
  const double lambda = GetParam();
  constexpr std::size_t kDraws = 200000;
  std::vector<double> v(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    CounterRng rng(11, 1, i);
    v[i] = sample_poisson(lambda, rng);
    ASSERT_EQ(v[i], std::floor(v[i]));
    ASSERT_GE(v[i], 0.0);
  }
  const auto m = moments(v);
  const double se_mean = std::sqrt(lambda / kDraws);
  EXPECT_NEAR(m.mean, lambda, 4.0 * se_mean);
  // Var of the sample variance for Poisson: (lambda + 2 lambda^2 (n/(n-1))) / n.
  const double se_var = std::sqrt((lambda + 2.0 * lambda * lambda) / kDraws);
  EXPECT_NEAR(m.var, lambda, 4.0 * se_var);
}

INSTANTIATE_TEST_SUITE_P(SmallAndLargeMeans, PoissonMoments,
                         ::testing::Values(0.3, 4.0, 9.99, 10.0, 37.5, 1000.0, 2.5e6));

TEST(Poisson, SmallMeanProbabilities) {
  // P(0) = exp(-lambda) for the inversion branch.
  constexpr std::size_t kDraws = 100000;
  const double lambda = 1.5;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    CounterRng rng(3, 9, i);
    zeros += sample_poisson(lambda, rng) == 0.0;
  }
  const double p = std::exp(-lambda);
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, p, 4.0 * std::sqrt(p * (1 - p) / kDraws));
  CounterRng rng(1, 1, 1);
  EXPECT_EQ(sample_poisson(0.0, rng), 0.0);
}

TEST(StandardNormal, Moments) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CounterRng rng(5, 2, i);
    v[i] = sample_standard_normal(rng);
  }
  const auto m = moments(v);
  EXPECT_NEAR(m.mean, 0.0, 4.0 / std::sqrt(1e5));
  EXPECT_NEAR(m.var, 1.0, 4.0 * std::sqrt(2.0 / 1e5));
}

TEST(NoiseParams, Validation) {
  NoiseParams p;
  EXPECT_NO_THROW(p.validate());
  p.t = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.t = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(p.validate());
  EXPECT_TRUE(p.noiseless());
  p.rho = -1.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.rho = 1.0;
  p.sigma = -0.1;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(SimulateGuide, LongExposureConvergesToTruth) {
  const auto cube = flat_cube(20, 20, 0.5);
  NoiseParams p;
  p.sigma = 0.0;
  p.t = 1e8 / (p.rho * 0.5);
  const auto g = simulate_guide(cube, p, SpectralResponse::flat(1), 1);
  // Relative std of the count is 1/sqrt(1e8) = 1e-4; 0.1% is 10 standard deviations.
  for (double v : g.data()) EXPECT_NEAR(v, 0.5, 5e-4);
}

TEST(SimulateGuide, ShotNoiseStd) {
  const auto cube = flat_cube(200, 200, 0.5);
  NoiseParams p;
  p.sigma = 0.0;
  p.t = 100.0 / (p.rho * 0.5);  // mean count 100
  const auto g = simulate_guide(cube, p, SpectralResponse::flat(1), 1);
  const auto m = moments(g.data());
  const double rt = p.rho * p.t;
  const double n = static_cast<double>(g.pixels());
  EXPECT_NEAR(m.mean, 0.5, 4.0 * std::sqrt(100.0 / n) / rt);
  EXPECT_NEAR(std::sqrt(m.var), 10.0 / rt, 4.0 * (10.0 / rt) / std::sqrt(2.0 * n));
}

TEST(SimulateGuide, ReadNoiseOnZeroScene) {
  const auto cube = flat_cube(200, 200, 0.0);
  NoiseParams p;
  p.t = 1e-6;
  const auto g = simulate_guide(cube, p, SpectralResponse::flat(1), 1);
  const auto m = moments(g.data());
  const double rt = p.rho * p.t;
  const double n = static_cast<double>(g.pixels());
  EXPECT_NEAR(m.mean, 0.0, 4.0 * (0.1 / rt) / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(m.var), 0.1 / rt, 4.0 * (0.1 / rt) / std::sqrt(2.0 * n));
}

TEST(SimulateGuide, OverflowGuard) {
  const auto cube = flat_cube(2, 2, 1.0);
  NoiseParams p;
  p.t = 1e9;
  EXPECT_THROW(simulate_guide(cube, p, SpectralResponse::flat(1)), ParameterError);
}

TEST(SimulateClues, UnbiasedWithReadNoiseMean) {
  const auto cube = flat_cube(100, 100, 0.3);
  NoiseParams p;
  p.t = 2e-7;
  p.mu = 0.5;
  p.seed = 9;
  const auto clues = simulate_clues(cube, Mask(100, 100, true), p, 1);
  const auto m = moments(clues.samples().values);
  const double rt = p.rho * p.t;
  const double expected = 0.3 + p.mu / rt;
  const double sd = std::sqrt(0.3 * rt + p.sigma * p.sigma) / rt;
  EXPECT_NEAR(m.mean, expected, 4.0 * sd / 100.0);
}

TEST(SimulateClues, DeterministicAcrossWorkers) {
  const auto cube = natural_scene(32, 32, 8, 1);
  const auto mask = sample_random(32, 32, 0.2, 3);
  NoiseParams p;
  p.t = 1e-6;
  p.seed = 42;
  const auto a = simulate_clues(cube, mask, p, 1);
  EXPECT_EQ(a, simulate_clues(cube, mask, p, 1));
  EXPECT_EQ(a, simulate_clues(cube, mask, p, 4));
  p.seed = 43;
  EXPECT_NE(a, simulate_clues(cube, mask, p, 1));
}

TEST(SimulateClues, VarianceFallsWithExposure) {
  const auto cube = flat_cube(60, 60, 0.4);
  double previous = std::numeric_limits<double>::infinity();
  for (double t : {1e-7, 1e-6, 1e-5}) {
    NoiseParams p;
    p.t = t;
    const auto v = moments(simulate_clues(cube, Mask(60, 60, true), p, 1).samples().values).var;
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(SimulateClues, LongExposureApproachesTruthAndInfiniteIsExact) {
  const auto cube = natural_scene(16, 16, 8, 2);
  const auto mask = sample_random(16, 16, 0.25, 1);
  NoiseParams p;
  p.t = 1.0;
  const auto noisy = simulate_clues(cube, mask, p, 1);
  const auto exact = cube_to_clues(cube, mask);
  EXPECT_LT(hctest::max_abs_diff(noisy.samples().values, exact.samples().values), 1e-3);
  p.t = std::numeric_limits<double>::infinity();
  EXPECT_EQ(simulate_clues(cube, mask, p, 1), exact);
}

TEST(SimulateClues, EmptyMaskRejected) {
  const auto cube = flat_cube(4, 4, 0.2);
  EXPECT_THROW(simulate_clues(cube, Mask(4, 4, false), NoiseParams{}), ParameterError);
}
